//! Diffeomorphism verdicts for pairs of complete intersections and the
//! Θ-rigidity row of a 4-dimensional one.
//!
//! Every verdict carries the tag of the result it rests on (see
//! [`citation`]). Statements that rest on a conjecture are marked as such and
//! never reported through a theorem-backed status.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::invariants::{sullivan_data, wu_profile, Multidegree, SullivanData};

/// Citation tags attached to verdicts.
pub mod citation {
    pub const MAIN: &str = "Theorem 1.2";
    pub const SPIN: &str = "Theorem 1.7";
    pub const RIGID: &str = "Theorem 1.9";
    pub const NON_SPIN_EVEN: &str = "Theorem 1.12(a)";
    pub const NON_SPIN_ODD: &str = "Theorem 1.12(b)";
    pub const X4_2_2: &str = "Remark rem:22";
    pub const INERTIA: &str = "Conjecture inertia";
    pub const CONVERSE: &str = "Proposition SC-conv";
    pub const SAME_MULTIDEGREE: &str = "Remark cl-gen (equal multidegrees)";
    pub const WALL_JUPP: &str = "Wall/Jupp classification (n=3)";
    pub const KRECK_TRAVING: &str = "Kreck-Traving Theorem A";
    pub const FANG_WANG: &str = "Fang-Wang (5 <= n <= 7, up to homeomorphism)";
    pub const FREEDMAN: &str = "Freedman (n=2, p_1 and Euler characteristic)";
    pub const OPEN: &str = "Sullivan Conjecture (open in this dimension)";
    pub const WU: &str = "Proposition SW-classes";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("valuation of {0} is undefined, need a positive integer")]
    NonPositive(BigInt),
    #[error("dimension {n} is not supported here, need n >= {min}")]
    Dimension { n: u32, min: u32 },
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// The `p`-adic valuation of `d`.
pub fn nu_p(d: &BigInt, p: u64) -> Result<u64, ClassifyError> {
    if !is_prime(p) {
        return Err(ClassifyError::NotPrime(p));
    }
    if d <= &BigInt::zero() {
        return Err(ClassifyError::NonPositive(d.clone()));
    }
    if p == 2 {
        return Ok(d.trailing_zeros().expect("d is nonzero"));
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut rest = d.clone();
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Ok(v);
        }
        rest = q;
        v += 1;
    }
}

/// Primes `p` with `p(p-1) <= n+1`, each with the least integer
/// `v >= (2n+1)/(2(p-1)) + 1`.
pub fn kreck_traving_thresholds(n: u32) -> Vec<(u64, u64)> {
    let n = u64::from(n);
    (2..)
        .take_while(|p| p * (p - 1) <= n + 1)
        .filter(|&p| is_prime(p))
        .map(|p| {
            let den = 2 * (p - 1);
            (p, (2 * n + 1 + den).div_ceil(den))
        })
        .collect()
}

/// Whether the total degree satisfies the divisibility hypothesis of the
/// Kreck-Traving theorem in dimension `n`.
pub fn kreck_traving_applies(n: u32, d: &BigInt) -> Result<bool, ClassifyError> {
    if n < 3 {
        return Err(ClassifyError::Dimension { n, min: 3 });
    }
    for (p, threshold) in kreck_traving_thresholds(n) {
        if nu_p(d, p)? < threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rigidity {
    StronglyThetaFlexible,
    ThetaRigid,
    ConjecturedFlexible,
    ConjecturedRigid,
}

/// The row of the four-case table (and of the inertia conjecture) that a
/// 4-dimensional complete intersection falls in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CaseRow {
    pub v2: bool,
    pub v4: bool,
    pub d_odd: bool,
    pub rigidity: Rigidity,
    pub is_conjecture: bool,
    /// `p_1(4, d) mod 8` in the library's sign convention.
    pub p1_mod8: u8,
    /// Result that settles the Sullivan Conjecture for this row.
    pub treated_in: &'static str,
    /// Result behind `rigidity`.
    pub rigidity_source: &'static str,
}

pub fn case_row(md: &Multidegree) -> CaseRow {
    let wu = wu_profile(md);
    let sd = sullivan_data(4, md);
    let p1_mod8 = sd.pontryagin[0]
        .mod_floor(&BigInt::from(8))
        .to_u8()
        .expect("residue mod 8");
    let d_odd = md.total_degree().is_odd();
    let (rigidity, treated_in, rigidity_source) = match (wu.v2, wu.v4) {
        (false, _) => (Rigidity::StronglyThetaFlexible, citation::SPIN, citation::SPIN),
        (true, false) if md.canonical_degrees() == [2, 2] => {
            (Rigidity::ThetaRigid, citation::RIGID, citation::X4_2_2)
        }
        (true, false) => (Rigidity::ThetaRigid, citation::RIGID, citation::RIGID),
        (true, true) => {
            let treated = if d_odd {
                citation::NON_SPIN_ODD
            } else {
                citation::NON_SPIN_EVEN
            };
            let rigidity = match p1_mod8 {
                3 => Rigidity::ConjecturedFlexible,
                7 => Rigidity::ConjecturedRigid,
                r => panic!("p_1 = {r} mod 8 for {md}, expected 3 mod 4 when v2 = v4 = 1"),
            };
            (rigidity, treated, citation::INERTIA)
        }
    };
    CaseRow {
        v2: wu.v2,
        v4: wu.v4,
        d_odd,
        rigidity,
        is_conjecture: wu.v2 && wu.v4,
        p1_mod8,
        treated_in,
        rigidity_source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Diffeomorphic,
    NotDiffeomorphic,
    HomeomorphicOnly,
    SDEqualConjectural,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub justification: &'static str,
    pub sd_equal: bool,
    /// Present for `n = 4` when both multidegrees fall in the same row.
    pub case_row: Option<CaseRow>,
    pub note: Option<&'static str>,
}

impl Verdict {
    fn new(status: Status, justification: &'static str, sd_equal: bool) -> Self {
        Verdict {
            status,
            justification,
            sd_equal,
            case_row: None,
            note: None,
        }
    }
}

/// Decides what is known about `X_n(a)` versus `X_n(b)`.
pub fn classify(n: u32, a: &Multidegree, b: &Multidegree) -> Result<Verdict, ClassifyError> {
    if n < 2 {
        return Err(ClassifyError::Dimension { n, min: 2 });
    }
    let sd_a = sullivan_data(n, a);
    let sd_b = sullivan_data(n, b);
    let mut verdict = classify_data(n, a == b, &sd_a, &sd_b)?;
    if n == 4 {
        let (row_a, row_b) = (case_row(a), case_row(b));
        if row_a == row_b {
            verdict.case_row = Some(row_a);
        }
    }
    Ok(verdict)
}

/// The decision procedure on precomputed Sullivan data. `same_multidegree`
/// says whether the canonical multidegrees coincide.
pub fn classify_data(
    n: u32,
    same_multidegree: bool,
    sd_a: &SullivanData,
    sd_b: &SullivanData,
) -> Result<Verdict, ClassifyError> {
    use Status::*;
    if n < 2 {
        return Err(ClassifyError::Dimension { n, min: 2 });
    }
    let sd_equal = sd_a == sd_b;
    if same_multidegree {
        return Ok(Verdict::new(Diffeomorphic, citation::SAME_MULTIDEGREE, sd_equal));
    }
    if n == 2 {
        let a = (sd_a.evaluated_p1(), &sd_a.euler);
        let b = (sd_b.evaluated_p1(), &sd_b.euler);
        return Ok(if a == b {
            Verdict::new(HomeomorphicOnly, citation::FREEDMAN, sd_equal)
        } else {
            Verdict {
                note: Some(
                    "smooth classification of complex surfaces is open here, and the \
                     total degree is not a diffeomorphism invariant for n = 2",
                ),
                ..Verdict::new(Unsupported, citation::FREEDMAN, sd_equal)
            }
        });
    }
    if !sd_equal {
        return Ok(Verdict::new(NotDiffeomorphic, citation::CONVERSE, false));
    }
    let verdict = match n {
        3 => Verdict::new(Diffeomorphic, citation::WALL_JUPP, true),
        4 => Verdict::new(Diffeomorphic, citation::MAIN, true),
        _ if kreck_traving_applies(n, &sd_a.total_degree)? => {
            Verdict::new(Diffeomorphic, citation::KRECK_TRAVING, true)
        }
        5..=7 => Verdict::new(HomeomorphicOnly, citation::FANG_WANG, true),
        _ => Verdict::new(SDEqualConjectural, citation::OPEN, true),
    };
    Ok(verdict)
}
