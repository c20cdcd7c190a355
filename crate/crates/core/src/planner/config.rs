use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::num::Scalar;

/// The three independent BA-POMCP adaptations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Variants {
    /// Draw one model `Ḋ ~ Dir(χ)` per simulation and skip count updates.
    pub root_sample_model: bool,
    /// Sample transitions from the expected model instead of a Dirichlet draw.
    pub expected_model: bool,
    /// Represent particles as linking states.
    pub linking_states: bool,
}

impl Variants {
    pub const PLAIN: Self = Self {
        root_sample_model: false,
        expected_model: false,
        linking_states: false,
    };

    pub const fn new(root_sample_model: bool, expected_model: bool, linking_states: bool) -> Self {
        Self {
            root_sample_model,
            expected_model,
            linking_states,
        }
    }

    /// All eight flag combinations, plain first.
    pub fn all() -> [Self; 8] {
        let mut out = [Self::PLAIN; 8];
        for (i, v) in out.iter_mut().enumerate() {
            *v = Self::new(i & 1 != 0, i & 2 != 0, i & 4 != 0);
        }
        out
    }

    /// Short flag string, e.g. `"rel"`; `"plain"` when no flag is set.
    pub fn flags(&self) -> String {
        let mut s = String::new();
        if self.root_sample_model {
            s.push('r');
        }
        if self.expected_model {
            s.push('e');
        }
        if self.linking_states {
            s.push('l');
        }
        if s.is_empty() {
            s.push_str("plain");
        }
        s
    }

    pub fn count(&self) -> usize {
        self.root_sample_model as usize + self.expected_model as usize + self.linking_states as usize
    }
}

/// Names like `L-R-E-BA-POMCP`.
impl fmt::Display for Variants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.linking_states {
            f.write_str("L-")?;
        }
        if self.root_sample_model {
            f.write_str("R-")?;
        }
        if self.expected_model {
            f.write_str("E-")?;
        }
        f.write_str("BA-POMCP")
    }
}

impl FromStr for Variants {
    type Err = Error;

    /// Accepts any combination of `r`, `e`, `l` (case-insensitive), or
    /// `plain`/`none`/empty for no flags.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let mut v = Self::PLAIN;
        if s.is_empty() || s == "plain" || s == "none" {
            return Ok(v);
        }
        for c in s.chars() {
            let flag = match c {
                'r' => &mut v.root_sample_model,
                'e' => &mut v.expected_model,
                'l' => &mut v.linking_states,
                '-' | '_' => continue,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown variant flag '{other}' (expected r, e, l)"
                    )))
                }
            };
            if *flag {
                return Err(Error::InvalidConfig(format!("variant flag '{c}' repeated")));
            }
            *flag = true;
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerConfig<F> {
    pub num_sims: usize,
    /// Simulation horizon, normally the remaining steps of the episode.
    pub max_depth: usize,
    pub discount: F,
    /// UCB exploration constant `c`.
    pub exploration: F,
    pub variants: Variants,
}

impl<F: Scalar> PlannerConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.num_sims == 0 {
            return Err(Error::NoSimulations);
        }
        if !(self.discount >= F::zero() && self.discount < F::one()) {
            return Err(Error::InvalidConfig(format!(
                "discount {} outside [0, 1)",
                self.discount
            )));
        }
        if !(self.exploration >= F::zero()) {
            return Err(Error::InvalidConfig(format!(
                "exploration constant {} is negative",
                self.exploration
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_combinations_are_distinct() {
        let all = Variants::all();
        for i in 0..8 {
            for j in 0..i {
                assert_ne!(all[i], all[j]);
            }
        }
        assert_eq!(all[0], Variants::PLAIN);
    }

    #[test]
    fn parse_and_display() {
        let v: Variants = "rel".parse().unwrap();
        assert_eq!(v, Variants::new(true, true, true));
        assert_eq!(v.to_string(), "L-R-E-BA-POMCP");
        assert_eq!("".parse::<Variants>().unwrap(), Variants::PLAIN);
        assert_eq!("plain".parse::<Variants>().unwrap().to_string(), "BA-POMCP");
        assert_eq!("E-R".parse::<Variants>().unwrap().to_string(), "R-E-BA-POMCP");
        assert!("rx".parse::<Variants>().is_err());
        assert!("rr".parse::<Variants>().is_err());
        for v in Variants::all() {
            assert_eq!(v.flags().parse::<Variants>().unwrap(), v);
        }
    }

    #[test]
    fn validation() {
        let mut cfg = PlannerConfig {
            num_sims: 10,
            max_depth: 5,
            discount: 0.95f64,
            exploration: 1.0,
            variants: Variants::PLAIN,
        };
        assert!(cfg.validate().is_ok());
        cfg.discount = 1.0;
        assert!(cfg.validate().is_err());
        cfg.discount = 0.5;
        cfg.exploration = -1.0;
        assert!(cfg.validate().is_err());
        cfg.exploration = 0.0;
        cfg.num_sims = 0;
        assert_eq!(cfg.validate(), Err(Error::NoSimulations));
    }
}
