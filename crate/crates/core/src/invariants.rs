//! Characteristic classes, Sullivan data and the mod-2 Wu profile of a
//! complete intersection `X_n(d_1, ..., d_k)`.
//!
//! All classes are pulled back from `CP^infinity`, so each total class is a
//! power series in the hyperplane class `x`:
//!
//! ```text
//! c(xi)  = (1+x)^-(n+k+1) * prod (1 + d_i x)
//! c(X)   = (1+x)^(n+k+1)  * prod (1 + d_i x)^-1
//! p(X)   = (1-x^2)^(n+k+1) * prod (1 - d_i^2 x^2)^-1
//! chi(X) = d * [x^n] c(X)
//! ```
//!
//! Pontryagin numbers use the sign convention `p(gamma^r) = 1 - r^2 x^2`, so
//! `p_i` here is `(-1)^i` times the classical value. Only equality of
//! Pontryagin data matters for classification, where the convention is
//! irrelevant; [`SullivanData::classical_pontryagin`] gives the other one.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::series::TruncSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultidegreeError {
    #[error("a multidegree needs at least one degree")]
    Empty,
    #[error("degree {0} is not a positive integer")]
    NonPositive(i64),
}

/// A multiset of hypersurface degrees.
///
/// Multidegrees that differ only by degrees equal to 1 define the same
/// complete intersection, so equality, ordering and hashing all use the
/// canonical form (1s removed, sorted descending). The raw degrees are kept
/// because `k` enters the characteristic class formulas.
#[derive(Debug, Clone)]
pub struct Multidegree {
    raw: Vec<u64>,
    canonical: Vec<u64>,
    total_degree: BigInt,
}

impl Multidegree {
    pub fn new(raw: impl IntoIterator<Item = u64>) -> Result<Self, MultidegreeError> {
        let raw: Vec<u64> = raw.into_iter().collect();
        if raw.is_empty() {
            return Err(MultidegreeError::Empty);
        }
        if raw.contains(&0) {
            return Err(MultidegreeError::NonPositive(0));
        }
        let mut canonical: Vec<u64> = raw.iter().copied().filter(|&d| d != 1).collect();
        canonical.sort_unstable_by(|a, b| b.cmp(a));
        let total_degree = product(&canonical);
        Ok(Multidegree {
            raw,
            canonical,
            total_degree,
        })
    }

    /// Same as [`Multidegree::new`] for signed input, rejecting entries < 1.
    pub fn from_signed(raw: impl IntoIterator<Item = i64>) -> Result<Self, MultidegreeError> {
        let raw = raw
            .into_iter()
            .map(|d| u64::try_from(d).map_err(|_| MultidegreeError::NonPositive(d)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(raw)
    }

    /// Multidegree of `CP^n`.
    pub fn projective_space() -> Self {
        Self::new([1]).expect("{1} is a valid multidegree")
    }

    pub fn raw_degrees(&self) -> &[u64] {
        &self.raw
    }

    pub fn canonical_degrees(&self) -> &[u64] {
        &self.canonical
    }

    /// Number of defining hypersurfaces, counting degree-1 entries.
    pub fn k(&self) -> usize {
        self.raw.len()
    }

    pub fn total_degree(&self) -> &BigInt {
        &self.total_degree
    }

    /// Number of even degrees.
    pub fn even_count(&self) -> usize {
        self.raw.iter().filter(|&&d| d % 2 == 0).count()
    }

    /// Distinct raw degrees with their multiplicities, ascending.
    pub fn multiplicities(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for &d in &self.raw {
            *out.entry(d).or_insert(0) += 1;
        }
        out
    }

    /// Canonical form with a number of 1s appended.
    pub fn with_ones(&self, ones: usize) -> Self {
        let mut raw = self.canonical.clone();
        raw.extend(std::iter::repeat_n(1, ones));
        if raw.is_empty() {
            raw.push(1);
        }
        Self::new(raw).expect("degrees of a valid multidegree")
    }
}

fn product(degrees: &[u64]) -> BigInt {
    degrees
        .iter()
        .fold(BigInt::one(), |acc, &d| acc * BigInt::from(d))
}

impl PartialEq for Multidegree {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

impl Eq for Multidegree {}

impl Hash for Multidegree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical.hash(state);
    }
}

impl PartialOrd for Multidegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree first, then reverse lexicographic on the canonical degrees,
/// so `{8} < {4,2} < {2,2,2}`.
impl Ord for Multidegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree
            .cmp(&other.total_degree)
            .then_with(|| other.canonical.cmp(&self.canonical))
    }
}

/// Compact multiplicity notation, e.g. `3^150,7^89,15`.
impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.canonical.is_empty() {
            return f.write_str("1");
        }
        let mut runs: Vec<(u64, usize)> = Vec::new();
        for &d in &self.canonical {
            match runs.last_mut() {
                Some((v, m)) if *v == d => *m += 1,
                _ => runs.push((d, 1)),
            }
        }
        for (i, (d, m)) in runs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if *m == 1 {
                write!(f, "{d}")?;
            } else {
                write!(f, "{d}^{m}")?;
            }
        }
        Ok(())
    }
}

fn one_plus_x_pow(exp: i64, precision: usize) -> TruncSeries {
    TruncSeries::linear(1, precision)
        .int_pow(exp)
        .expect("1 + x is a unit")
}

/// Product of `(1 + d x)^(sign * m)` over the raw degrees.
fn degree_product(md: &Multidegree, sign: i64, precision: usize) -> TruncSeries {
    md.multiplicities()
        .into_iter()
        .fold(TruncSeries::one(precision), |acc, (d, m)| {
            let factor = TruncSeries::linear(d, precision)
                .int_pow(sign * m as i64)
                .expect("1 + d x is a unit");
            &acc * &factor
        })
}

fn ambient_exponent(n: u32, md: &Multidegree) -> i64 {
    i64::from(n) + md.k() as i64 + 1
}

/// Total Chern class of the bundle `xi_n(d)` (and of the normal bundle of
/// `X_n(d)`), to the given precision.
pub fn chern_total_xi(n: u32, md: &Multidegree, precision: usize) -> TruncSeries {
    let ambient = one_plus_x_pow(-ambient_exponent(n, md), precision);
    &ambient * &degree_product(md, 1, precision)
}

/// Total Chern class of the tangent bundle of `X_n(d)`.
pub fn chern_total_x(n: u32, md: &Multidegree, precision: usize) -> TruncSeries {
    let ambient = one_plus_x_pow(ambient_exponent(n, md), precision);
    &ambient * &degree_product(md, -1, precision)
}

/// Total Pontryagin class of `X_n(d)` to precision `2 * floor(n/2)`.
pub fn pontryagin_total_x(n: u32, md: &Multidegree) -> TruncSeries {
    let half = (n / 2) as usize;
    // work in y = x^2, then spread back out
    let ambient = TruncSeries::new([1, -1], half)
        .int_pow(ambient_exponent(n, md))
        .expect("1 - y is a unit");
    let degrees = md
        .multiplicities()
        .into_iter()
        .fold(TruncSeries::one(half), |acc, (d, m)| {
            let d2 = BigInt::from(d) * BigInt::from(d);
            let factor = TruncSeries::new([BigInt::one(), -d2], half)
                .int_pow(-(m as i64))
                .expect("1 - d^2 y is a unit");
            &acc * &factor
        });
    (&ambient * &degrees).substitute_square(2 * half)
}

pub fn euler_char(n: u32, md: &Multidegree) -> BigInt {
    let c = chern_total_x(n, md, n as usize);
    md.total_degree() * c.coeff(n as usize).expect("tracked to x^n")
}

/// The Sullivan data `(d, p_1, ..., p_{floor(n/2)}, chi)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SullivanData {
    pub n: u32,
    pub total_degree: BigInt,
    pub pontryagin: Vec<BigInt>,
    pub euler: BigInt,
}

impl SullivanData {
    /// Pontryagin numbers in the classical sign convention, `(-1)^i p_i`.
    pub fn classical_pontryagin(&self) -> Vec<BigInt> {
        self.pontryagin
            .iter()
            .enumerate()
            .map(|(i, p)| if (i + 1) % 2 == 1 { -p } else { p.clone() })
            .collect()
    }

    /// `p_1` evaluated on the fundamental class, `p_1 * d`. Only meaningful
    /// for `n >= 2`.
    pub fn evaluated_p1(&self) -> Option<BigInt> {
        self.pontryagin.first().map(|p| p * &self.total_degree)
    }
}

pub fn sullivan_data(n: u32, md: &Multidegree) -> SullivanData {
    let p = pontryagin_total_x(n, md);
    let pontryagin = (1..=(n / 2) as usize)
        .map(|i| p.coeff(2 * i).expect("tracked to x^(2 floor(n/2))").clone())
        .collect();
    SullivanData {
        n,
        total_degree: md.total_degree().clone(),
        pontryagin,
        euler: euler_char(n, md),
    }
}

/// Stiefel-Whitney and Wu classes of a 4-dimensional complete intersection,
/// each regarded as an element of `Z/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WuProfile {
    /// Number of even degrees.
    pub p_count: usize,
    pub w2_nu: bool,
    pub w4_nu: bool,
    pub v2: bool,
    pub v4: bool,
    pub w4_x: bool,
}

impl WuProfile {
    /// Reads the classes off the table indexed by the number of even
    /// degrees mod 4.
    pub fn from_table(p_count: usize) -> Self {
        let (w2_nu, w4_nu, w4_x) = match p_count % 4 {
            0 => (true, true, false),
            1 => (false, true, true),
            2 => (true, false, true),
            _ => (false, false, false),
        };
        WuProfile {
            p_count,
            w2_nu,
            w4_nu,
            v2: w2_nu,
            v4: w4_nu,
            w4_x,
        }
    }

    /// Computes the classes from `w_{2i}(xi) = c_i(xi) mod 2`, the Cartan
    /// formula `w_4(X) = w_2(nu)^2 + w_4(nu)` and the Wu formula.
    pub fn from_series(md: &Multidegree) -> Self {
        let c = chern_total_xi(4, md, 2).reduce_mod2();
        let w2_nu = c.coeff(1).expect("precision 2");
        let w4_nu = c.coeff(2).expect("precision 2");
        let w2_x = w2_nu;
        // a bit squares to itself
        let w4_x = w2_nu ^ w4_nu;
        WuProfile {
            p_count: md.even_count(),
            w2_nu,
            w4_nu,
            v2: w2_x,
            v4: w2_x ^ w4_x,
            w4_x,
        }
    }

    pub fn is_spin(&self) -> bool {
        !self.v2
    }
}

/// Wu profile of `X_4(d)`. The table lookup is cross-checked against the
/// direct mod-2 reduction of the Chern series.
pub fn wu_profile(md: &Multidegree) -> WuProfile {
    let table = WuProfile::from_table(md.even_count());
    let direct = WuProfile::from_series(md);
    assert_eq!(
        table, direct,
        "Wu table disagrees with the mod-2 Chern series for {md}"
    );
    table
}

/// 2-adic valuation of a positive integer.
pub fn two_adic_valuation(d: &BigInt) -> Option<u64> {
    if d.is_positive() {
        d.trailing_zeros()
    } else {
        None
    }
}
