use std::ops::{Div, Mul};
use std::sync::RwLock;

use crate::error::{Error, Result};

/// A real number stored as sign and natural log of its magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    sign: i8,
    logmag: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, logmag: f64::NEG_INFINITY };
    pub const ONE: SignedLog = SignedLog { sign: 1, logmag: 0.0 };

    /// Builds a value from a sign in {-1, 0, 1} and a log-magnitude.
    pub fn new(sign: i8, logmag: f64) -> Self {
        match sign.signum() {
            0 => Self::ZERO,
            s if logmag == f64::NEG_INFINITY => {
                let _ = s;
                Self::ZERO
            }
            s => SignedLog { sign: s, logmag },
        }
    }

    /// Positive value with the given log-magnitude.
    pub fn from_ln(logmag: f64) -> Self {
        Self::new(1, logmag)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: if x > 0.0 { 1 } else { -1 }, logmag: x.abs().ln() }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.logmag.exp(),
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn logmag(self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.logmag
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(self) -> Self {
        debug_assert!(self.sign >= 0, "sqrt of negative SignedLog");
        if self.sign == 0 {
            Self::ZERO
        } else {
            SignedLog { sign: 1, logmag: 0.5 * self.logmag }
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.sign == 0 || rhs.sign == 0 {
            SignedLog::ZERO
        } else {
            SignedLog { sign: self.sign * rhs.sign, logmag: self.logmag + rhs.logmag }
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: SignedLog) -> SignedLog {
        assert!(rhs.sign != 0, "division by zero SignedLog");
        if self.sign == 0 {
            SignedLog::ZERO
        } else {
            SignedLog { sign: self.sign * rhs.sign, logmag: self.logmag - rhs.logmag }
        }
    }
}

/// Sum of signed-log terms by factoring out the largest magnitude.
///
/// A result smaller than `1e-300` times the largest term is returned as an
/// exact zero.
pub fn slog_sum(terms: &[SignedLog]) -> SignedLog {
    let max = terms
        .iter()
        .filter(|t| t.sign != 0)
        .map(|t| t.logmag)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return SignedLog::ZERO;
    }
    let mut acc = 0.0;
    let mut comp = 0.0;
    for t in terms.iter().filter(|t| t.sign != 0) {
        let x = f64::from(t.sign) * (t.logmag - max).exp();
        // Neumaier compensation keeps the result independent of term order.
        let s = acc + x;
        if acc.abs() >= x.abs() {
            comp += (acc - s) + x;
        } else {
            comp += (x - s) + acc;
        }
        acc = s;
    }
    let rel = acc + comp;
    if rel.abs() < 1e-300 {
        SignedLog::ZERO
    } else {
        SignedLog { sign: if rel > 0.0 { 1 } else { -1 }, logmag: max + rel.abs().ln() }
    }
}

/// Cumulative ln m! stored as an unevaluated double-double sum.
static LN_FACT: RwLock<Vec<(f64, f64)>> = RwLock::new(Vec::new());

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn ensure_table(n: usize) {
    if LN_FACT.read().unwrap().len() > n {
        return;
    }
    let mut table = LN_FACT.write().unwrap();
    if table.is_empty() {
        table.push((0.0, 0.0));
    }
    let target = (n + 1).max(2 * table.len()).max(1024);
    while table.len() < target {
        let m = table.len();
        let (hi, lo) = table[m - 1];
        let (s, e) = two_sum(hi, (m as f64).ln());
        let (hi2, lo2) = two_sum(s, e + lo);
        table.push((hi2, lo2));
    }
}

fn dd(n: usize) -> (f64, f64) {
    ensure_table(n);
    LN_FACT.read().unwrap()[n]
}

/// ln n! by exact summation of ln m.
pub fn ln_factorial(n: usize) -> f64 {
    let (hi, lo) = dd(n);
    hi + lo
}

/// `[ln 0!, ln 1!, ..., ln n_max!]` for hot loops.
pub fn ln_factorial_table(n_max: usize) -> Vec<f64> {
    ensure_table(n_max);
    LN_FACT.read().unwrap()[..=n_max].iter().map(|&(h, l)| h + l).collect()
}

/// ln C(n, k) from the log-factorial table.
pub fn log_binomial(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("log_binomial: k = {k} exceeds n = {n}")));
    }
    let (a, al) = dd(n);
    let (b, bl) = dd(k);
    let (c, cl) = dd(n - k);
    let (s1, e1) = two_sum(a, -b);
    let (s2, e2) = two_sum(s1, -c);
    Ok(s2 + (e1 + e2 + (al - bl - cl)))
}
