//! Paraconsistent and probabilistic truth values.
//!
//! Three layers, with exact conversions between them:
//!
//! * [`FourValuedTv`] — crisp four-valued truth: a pair of booleans
//!   `(pos, neg)` read as "there is evidence for" / "there is evidence
//!   against". `(T,T)` is Both, `(F,F)` is Neither.
//! * [`EvidenceTv`] — graded evidence `(w_plus, w_minus)`, each component in
//!   `[0,1]`, counting (normalized) situations providing positive or negative
//!   evidence. A situation may provide both, or neither.
//! * [`SimpleTv`] — strength/confidence `(s, c)` probabilistic truth values.
//!
//! The connectives on [`FourValuedTv`] are component-wise: conjunction ANDs
//! the positive components and ORs the negative ones, disjunction is dual,
//! and negation swaps the components. This is the unique definition
//! consistent with the pair encoding plus negation-as-swap, and it satisfies
//! involution, De Morgan, commutativity, associativity and idempotence
//! exactly (see the exhaustive tests).

use thiserror::Error;

/// Errors raised by truth-value constructors and conversions.
#[derive(Debug, Error, PartialEq)]
pub enum LogicError {
    /// A component fell outside `[0,1]`.
    #[error("truth-value component {name} = {value} outside [0,1]")]
    RangeError { name: &'static str, value: f64 },
}

/// Crisp four-valued truth value: `(pos, neg)`.
///
/// States: `(false,false)` Neither, `(true,false)` True, `(false,true)`
/// False, `(true,true)` Both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FourValuedTv {
    pub pos: bool,
    pub neg: bool,
}

impl FourValuedTv {
    pub const NEITHER: Self = Self { pos: false, neg: false };
    pub const TRUE: Self = Self { pos: true, neg: false };
    pub const FALSE: Self = Self { pos: false, neg: true };
    pub const BOTH: Self = Self { pos: true, neg: true };

    /// All four states, in display order.
    pub const ALL: [Self; 4] = [Self::TRUE, Self::FALSE, Self::BOTH, Self::NEITHER];

    /// Conjunction: positive evidence requires both, negative evidence from either.
    pub fn and(self, other: Self) -> Self {
        Self { pos: self.pos && other.pos, neg: self.neg || other.neg }
    }

    /// Disjunction: dual of [`FourValuedTv::and`].
    pub fn or(self, other: Self) -> Self {
        Self { pos: self.pos || other.pos, neg: self.neg && other.neg }
    }

    /// Negation swaps evidence for and against.
    pub fn not(self) -> Self {
        Self { pos: self.neg, neg: self.pos }
    }

    pub fn name(self) -> &'static str {
        match (self.pos, self.neg) {
            (true, false) => "True",
            (false, true) => "False",
            (true, true) => "Both",
            (false, false) => "Neither",
        }
    }
}

impl std::fmt::Display for FourValuedTv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Graded paraconsistent evidence value `(w_plus, w_minus)`.
///
/// Components are independent: their sum may reach 2 (every situation
/// provides both kinds of evidence). [`EvidenceTv::to_simple`] clamps
/// confidence at 1 in that regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvidenceTv {
    w_plus: f64,
    w_minus: f64,
}

impl EvidenceTv {
    pub fn new(w_plus: f64, w_minus: f64) -> Result<Self, LogicError> {
        check_unit("w_plus", w_plus)?;
        check_unit("w_minus", w_minus)?;
        Ok(Self { w_plus, w_minus })
    }

    /// Evidence from raw observation counts with PLN-style confidence
    /// lookahead `k` (default 1): `w± = n± / (n + k)` where `n = n+ + n-`.
    pub fn from_counts(n_plus: u64, n_minus: u64, k: f64) -> Self {
        let n = (n_plus + n_minus) as f64;
        if n == 0.0 {
            return Self { w_plus: 0.0, w_minus: 0.0 };
        }
        Self {
            w_plus: n_plus as f64 / (n + k),
            w_minus: n_minus as f64 / (n + k),
        }
    }

    pub fn w_plus(&self) -> f64 {
        self.w_plus
    }

    pub fn w_minus(&self) -> f64 {
        self.w_minus
    }

    /// Rescales to a strength/confidence pair: `c = min(1, w+ + w-)`,
    /// `s = w+ / (w+ + w-)`, with `s = 1/2` under zero evidence.
    pub fn to_simple(&self) -> SimpleTv {
        let total = self.w_plus + self.w_minus;
        if total == 0.0 {
            return SimpleTv { s: 0.5, c: 0.0 };
        }
        SimpleTv { s: self.w_plus / total, c: total.min(1.0) }
    }

    /// Thresholds each component at `eps` to a crisp four-valued state.
    pub fn to_four_valued(&self, eps: f64) -> FourValuedTv {
        FourValuedTv { pos: self.w_plus > eps, neg: self.w_minus > eps }
    }
}

/// Probabilistic simple truth value: strength `s` and confidence `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpleTv {
    s: f64,
    c: f64,
}

impl SimpleTv {
    pub fn new(s: f64, c: f64) -> Result<Self, LogicError> {
        check_unit("s", s)?;
        check_unit("c", c)?;
        Ok(Self { s, c })
    }

    pub fn strength(&self) -> f64 {
        self.s
    }

    pub fn confidence(&self) -> f64 {
        self.c
    }

    /// Inverse rescaling: `w+ = s*c`, `w- = (1-s)*c`.
    pub fn to_evidence(&self) -> EvidenceTv {
        EvidenceTv { w_plus: self.s * self.c, w_minus: (1.0 - self.s) * self.c }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), LogicError> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(LogicError::RangeError { name, value });
    }
    Ok(())
}

/// Renders the four-valued connective tables as plain text, one connective
/// per block (used by the CLI).
pub fn connective_tables() -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let states = FourValuedTv::ALL;
    writeln!(out, "not:").unwrap();
    for a in states {
        writeln!(out, "  not {} = {}", a, a.not()).unwrap();
    }
    for (label, f) in [
        ("and", FourValuedTv::and as fn(FourValuedTv, FourValuedTv) -> FourValuedTv),
        ("or", FourValuedTv::or),
    ] {
        writeln!(out, "{}:", label).unwrap();
        for a in states {
            for b in states {
                writeln!(out, "  {} {} {} = {}", a, label, b, f(a, b)).unwrap();
            }
        }
    }
    out
}
