use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("cannot read configuration {path}: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },

    #[error("malformed configuration: {0}")]
    Malformed(String),

    #[error("unsupported schema_version {found} (this build reads {expected})")]
    Schema { found: u32, expected: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("precondition failed in {suite}: {source}")]
    Precondition { suite: &'static str, source: dunkl_core::Error },

    #[error("numerical failure in {suite}: {source}")]
    Numerical { suite: &'static str, source: dunkl_core::Error },

    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Process exit status for this error. Status 1 is reserved for failed gates
    /// and 2 for command-line usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Unreadable { .. } | LabError::Malformed(_) | LabError::Schema { .. } | LabError::Config(_) => 3,
            LabError::UnknownName { .. } => 4,
            LabError::Precondition { .. } | LabError::Numerical { .. } => 5,
            LabError::Output { .. } | LabError::Csv(_) => 6,
        }
    }

    /// Wraps a core error raised while running `suite`.
    pub fn core(suite: &'static str, e: dunkl_core::Error) -> Self {
        use dunkl_core::Error as E;
        match e {
            E::Precondition(_) | E::OrbitDiagonal | E::DegenerateSet | E::UncoveredPoint | E::NoClosedForm | E::DimensionMismatch { .. } => {
                LabError::Precondition { suite, source: e }
            }
            E::InvalidKernel(ref msg) if msg.starts_with("unknown kernel") => {
                LabError::UnknownName { kind: "kernel", name: msg.trim_start_matches("unknown kernel ").to_string() }
            }
            _ => LabError::Numerical { suite, source: e },
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

/// `?`-friendly conversion for core results inside a named suite.
pub trait InSuite<T> {
    fn in_suite(self, suite: &'static str) -> Result<T>;
}

impl<T> InSuite<T> for dunkl_core::Result<T> {
    fn in_suite(self, suite: &'static str) -> Result<T> {
        self.map_err(|e| LabError::core(suite, e))
    }
}
