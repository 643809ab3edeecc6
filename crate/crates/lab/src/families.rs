//! Named, seeded families of symbols `b` and inputs `f` on the line.

use crate::error::{LabError, Result};
use dunkl_core::function_spaces::{lipschitz_family, LipschitzWitness, WitnessKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SYMBOL_FAMILIES: [&str; 2] = ["lipschitz", "constant"];
pub const INPUT_FAMILIES: [&str; 2] = ["bumps", "waves"];

pub fn check_symbol_family(name: &str) -> Result<()> {
    if SYMBOL_FAMILIES.contains(&name) {
        Ok(())
    } else {
        Err(LabError::UnknownName { kind: "symbol family", name: name.into() })
    }
}

pub fn check_input_family(name: &str) -> Result<()> {
    if INPUT_FAMILIES.contains(&name) {
        Ok(())
    } else {
        Err(LabError::UnknownName { kind: "input family", name: name.into() })
    }
}

/// Accepts the builtin kernel names. Whether an axis exists is checked
/// against each root system when the suite runs.
pub fn check_kernel_name(name: &str) -> Result<()> {
    let ok = name == "radial-power"
        || name.strip_prefix("riesz-").is_some_and(|j| !j.is_empty() && j.bytes().all(|c| c.is_ascii_digit()));
    if ok {
        Ok(())
    } else {
        Err(LabError::UnknownName { kind: "kernel", name: name.into() })
    }
}

/// A symbol on the line, either a Lipschitz witness or a constant.
#[derive(Debug, Clone, PartialEq)]
pub enum LineSymbol {
    Witness(LipschitzWitness),
    Constant(f64),
}

impl LineSymbol {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LineSymbol::Witness(w) => w.eval(&[x]),
            LineSymbol::Constant(c) => *c,
        }
    }

    pub fn id(&self, i: usize) -> String {
        match self {
            LineSymbol::Witness(w) => {
                let kind = match w.kind {
                    WitnessKind::Tent => "tent",
                    WitnessKind::Bump => "bump",
                    WitnessKind::Plateau => "plateau",
                };
                format!("b{i:02}-{kind}")
            }
            LineSymbol::Constant(_) => format!("b{i:02}-const"),
        }
    }
}

pub fn symbols(name: &str, seed: u64, count: usize) -> Result<Vec<LineSymbol>> {
    check_symbol_family(name)?;
    Ok(match name {
        "lipschitz" => lipschitz_family(1, seed, count).into_iter().map(LineSymbol::Witness).collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| LineSymbol::Constant(rng.gen_range(-2.0..2.0))).collect()
        }
    })
}

/// A smooth compactly supported input `a (1 - t^2)^3 cos(w t)` with
/// `t = (x - c)/r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineInput {
    pub center: f64,
    pub radius: f64,
    pub amplitude: f64,
    pub frequency: f64,
}

impl LineInput {
    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.radius;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t * t;
        self.amplitude * s * s * s * (self.frequency * t).cos()
    }

    pub fn id(&self, i: usize) -> String {
        format!("f{i:02}")
    }
}

/// Inputs supported inside `[-support, support]`. `waves` adds an
/// oscillating factor to the bumps.
pub fn inputs(name: &str, seed: u64, count: usize, support: f64) -> Result<Vec<LineInput>> {
    check_input_family(name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oscillate = name == "waves";
    Ok((0..count)
        .map(|_| {
            let radius = rng.gen_range(0.3..0.4 * support);
            let reach = support - radius;
            LineInput {
                center: rng.gen_range(-reach..reach),
                radius,
                amplitude: rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                frequency: if oscillate { rng.gen_range(1.0..8.0) } else { 0.0 },
            }
        })
        .collect())
}
