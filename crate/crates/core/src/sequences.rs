//! Scalar parameter sequences and the conditions placed on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real sequence indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Sequence {
    /// `c / (n + 1)^p`.
    Harmonic { c: f64, p: f64 },
    Constant { value: f64 },
    /// Explicit values for `n = 1, 2, ...`.
    Table { values: Vec<f64> },
}

impl Sequence {
    pub fn harmonic(c: f64, p: f64) -> Self {
        Sequence::Harmonic { c, p }
    }

    pub fn constant(value: f64) -> Self {
        Sequence::Constant { value }
    }

    /// The `n`-th term (`n ≥ 1`), or `None` past the end of a table.
    pub fn get(&self, n: usize) -> Option<f64> {
        debug_assert!(n >= 1);
        match self {
            Sequence::Harmonic { c, p } => Some(c / ((n + 1) as f64).powf(*p)),
            Sequence::Constant { value } => Some(*value),
            Sequence::Table { values } => values.get(n - 1).copied(),
        }
    }

    fn prefix(&self, len: usize) -> Result<Vec<f64>> {
        (1..=len)
            .map(|n| {
                self.get(n).filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::config("sequence length", format!("no finite term for n = {n} (need {len})"))
                })
            })
            .collect()
    }
}

/// How a condition on a sequence was established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionStatus {
    /// Holds for the whole sequence by construction.
    Verified,
    /// Holds on the finite prefix that was checked; the limit is not verifiable.
    PrefixOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub status: ConditionStatus,
}

fn cond(name: &str, status: ConditionStatus) -> Condition {
    Condition { name: name.to_string(), status }
}

fn violated(name: &str, detail: impl Into<String>) -> Error {
    Error::config(name, detail)
}

/// The weights `(t_n, b_n)` of the two-step iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequencePair {
    pub t: Sequence,
    pub b: Sequence,
}

impl SequencePair {
    /// `t_n = 1/(n+1)`, `b_n = 1/2`.
    pub fn standard() -> Self {
        SequencePair {
            t: Sequence::harmonic(1.0, 1.0),
            b: Sequence::constant(0.5),
        }
    }

    /// Checks conditions (i)-(iv) over the first `len` terms, and for all `n`
    /// where the family allows it.
    pub fn validate(&self, len: usize) -> Result<Vec<Condition>> {
        const I: &str = "(i) t_n, b_n in (0,1)";
        const II: &str = "(ii) 0 < liminf b_n <= limsup b_n < 1";
        const III: &str = "(iii) t_n -> 0";
        const IV: &str = "(iv) sum t_n = infinity";

        let (t, b) = (self.t.prefix(len)?, self.b.prefix(len)?);
        if let Some((n, v)) = t.iter().chain(&b).enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
            let (which, n) = if n < len { ("t", n + 1) } else { ("b", n - len + 1) };
            return Err(violated(I, format!("{which}_{n} = {v}")));
        }
        let exact = |s: &Sequence| !matches!(s, Sequence::Table { .. });
        let status = |ok: bool| if ok { ConditionStatus::Verified } else { ConditionStatus::PrefixOnly };
        let mut out = vec![cond(I, status(exact(&self.t) && exact(&self.b)))];

        match &self.b {
            Sequence::Harmonic { .. } => {
                return Err(violated(II, "a harmonic b_n tends to 0, so liminf b_n = 0"))
            }
            Sequence::Constant { .. } => out.push(cond(II, ConditionStatus::Verified)),
            Sequence::Table { .. } => out.push(cond(II, ConditionStatus::PrefixOnly)),
        }
        match &self.t {
            Sequence::Harmonic { p, .. } => {
                if !(*p > 0.0) {
                    return Err(violated(III, format!("exponent p = {p} must be positive")));
                }
                out.push(cond(III, ConditionStatus::Verified));
                if *p > 1.0 {
                    return Err(violated(IV, format!("sum of c/(n+1)^{p} converges")));
                }
                out.push(cond(IV, ConditionStatus::Verified));
            }
            Sequence::Constant { value } => {
                return Err(violated(III, format!("constant t_n = {value} does not tend to 0")))
            }
            Sequence::Table { .. } => {
                out.push(cond(III, ConditionStatus::PrefixOnly));
                out.push(cond(IV, ConditionStatus::PrefixOnly));
            }
        }
        Ok(out)
    }
}

/// Parameters of the scalar recursion `s_{n+1} = (1 − α_n) s_n + α_n β_n + γ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XuSequences {
    pub alpha: Sequence,
    pub beta: Sequence,
    pub gamma: Sequence,
}

impl XuSequences {
    /// Checks `α_n ∈ [0,1]` with `Σ α_n = ∞`, `limsup β_n ≤ 0` and
    /// `γ_n ≥ 0` with `Σ γ_n < ∞`.
    pub fn validate(&self, len: usize) -> Result<Vec<Condition>> {
        const A: &str = "alpha_n in [0,1], sum alpha_n = infinity";
        const B: &str = "limsup beta_n <= 0";
        const G: &str = "gamma_n >= 0, sum gamma_n < infinity";
        let mut out = Vec::new();

        let alpha = self.alpha.prefix(len)?;
        if let Some((n, v)) = alpha.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(violated(A, format!("alpha_{} = {v}", n + 1)));
        }
        out.push(cond(
            A,
            match &self.alpha {
                Sequence::Harmonic { p, .. } if *p <= 1.0 => ConditionStatus::Verified,
                Sequence::Harmonic { p, .. } => {
                    return Err(violated(A, format!("sum of c/(n+1)^{p} converges")))
                }
                Sequence::Constant { value } if *value > 0.0 => ConditionStatus::Verified,
                Sequence::Constant { .. } => return Err(violated(A, "alpha_n = 0 is not summable to infinity")),
                Sequence::Table { .. } => ConditionStatus::PrefixOnly,
            },
        ));

        self.beta.prefix(len)?;
        out.push(cond(
            B,
            match &self.beta {
                Sequence::Harmonic { p, .. } if *p > 0.0 => ConditionStatus::Verified,
                Sequence::Harmonic { p, .. } => {
                    return Err(violated(B, format!("c/(n+1)^{p} does not tend to 0")))
                }
                Sequence::Constant { value } if *value <= 0.0 => ConditionStatus::Verified,
                Sequence::Constant { value } => return Err(violated(B, format!("beta_n = {value} > 0"))),
                Sequence::Table { .. } => ConditionStatus::PrefixOnly,
            },
        ));

        let gamma = self.gamma.prefix(len)?;
        if let Some((n, v)) = gamma.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(violated(G, format!("gamma_{} = {v}", n + 1)));
        }
        out.push(cond(
            G,
            match &self.gamma {
                Sequence::Harmonic { c, .. } if *c == 0.0 => ConditionStatus::Verified,
                Sequence::Harmonic { p, .. } if *p > 1.0 => ConditionStatus::Verified,
                Sequence::Harmonic { p, .. } => {
                    return Err(violated(G, format!("sum of c/(n+1)^{p} diverges")))
                }
                Sequence::Constant { value } if *value == 0.0 => ConditionStatus::Verified,
                Sequence::Constant { value } => {
                    return Err(violated(G, format!("constant gamma_n = {value} is not summable")))
                }
                Sequence::Table { .. } => ConditionStatus::PrefixOnly,
            },
        ));
        Ok(out)
    }
}
