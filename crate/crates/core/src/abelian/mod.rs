//! Finitely generated abelian groups and homomorphisms between them.
//!
//! Groups are given by presentations `Z^g / R` where the columns of `R` are
//! the relations. Everything that needs a canonical answer (isomorphism
//! type, kernels, cokernels, exactness) goes through the Smith normal form.

mod matrix;
pub mod ledger;

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

pub use matrix::{column_basis, in_column_span, kernel_basis, smith_normal_form, solve, Matrix, Snf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("torsion coefficients {0:?} are not a divisibility chain of integers >= 2")]
    NotCanonical(Vec<u64>),
    #[error("matrix is {rows}x{cols} but the map needs {expected_rows}x{expected_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("homomorphism is ill-defined: relation {0} of the source does not map to zero")]
    IllDefined(usize),
    #[error("maps {0} and {1} in the sequence do not compose")]
    Mismatch(usize, usize),
    #[error("{0} is not a finite cyclic group")]
    NotCyclic(FinAbGroup),
    #[error(
        "ambiguous extension of {quot} by {sub}: a nontrivial bracket only pins the class for Z/2 by Z/2"
    )]
    AmbiguousExtension { sub: FinAbGroup, quot: FinAbGroup },
}

/// Isomorphism type `Z^free_rank + Z/t_1 + ... + Z/t_m` with
/// `t_1 | t_2 | ... | t_m` and every `t_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FinAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl FinAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<u64>) -> Result<Self, AbelianError> {
        let chain = torsion.iter().all(|&t| t >= 2)
            && torsion.windows(2).all(|w| w[1] % w[0] == 0);
        if !chain {
            return Err(AbelianError::NotCanonical(torsion));
        }
        Ok(FinAbGroup { free_rank, torsion })
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            free_rank: 0,
            torsion: vec![],
        }
    }

    /// `Z/m`, or `Z` when `m = 0`.
    pub fn cyclic(m: u64) -> Self {
        Self::from_orders(&[m])
    }

    /// Normalizes a direct sum of cyclic groups `Z/o_i` (`o_i = 0` meaning
    /// `Z`).
    pub fn from_orders(orders: &[u64]) -> Self {
        let diag: Vec<i64> = orders.iter().map(|&o| o as i64).collect();
        Presentation::new(orders.len(), Matrix::diagonal(orders.len(), orders.len(), &diag))
            .group()
    }

    pub fn order(&self) -> Option<u64> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite_cyclic(&self) -> bool {
        self.free_rank == 0 && self.torsion.len() == 1
    }

    pub fn torsion_subgroup(&self) -> FinAbGroup {
        FinAbGroup {
            free_rank: 0,
            torsion: self.torsion.clone(),
        }
    }

    /// Number of elements killed by `m`; determines a finite group up to
    /// isomorphism when taken over all `m`.
    pub fn count_killed_by(&self, m: u64) -> u64 {
        assert_eq!(self.free_rank, 0, "only for finite groups");
        self.torsion.iter().map(|&t| t.gcd(&m)).product()
    }

    pub fn presentation(&self) -> Presentation {
        let mut orders = vec![0u64; self.free_rank];
        orders.extend(&self.torsion);
        Presentation::cyclic_sum(&orders)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let parts = std::iter::repeat_n("Z".to_string(), self.free_rank)
            .chain(self.torsion.iter().map(|t| format!("Z/{t}")));
        f.write_str(&parts.collect::<Vec<_>>().join("+"))
    }
}

/// `Z^generators / (column span of relations)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: usize,
    relations: Matrix,
}

impl Presentation {
    pub fn new(generators: usize, relations: Matrix) -> Self {
        assert_eq!(relations.rows(), generators, "one relation row per generator");
        Presentation {
            generators,
            relations,
        }
    }

    pub fn free(generators: usize) -> Self {
        Self::new(generators, Matrix::zeros(generators, 0))
    }

    /// `Z/o_1 + ... + Z/o_g` on the evident generators.
    pub fn cyclic_sum(orders: &[u64]) -> Self {
        let rels: Vec<Vec<i64>> = orders
            .iter()
            .enumerate()
            .filter(|(_, &o)| o != 0)
            .map(|(i, &o)| {
                let mut c = vec![0; orders.len()];
                c[i] = o as i64;
                c
            })
            .collect();
        Self::new(orders.len(), Matrix::from_columns(orders.len(), &rels))
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &Matrix {
        &self.relations
    }

    pub fn group(&self) -> FinAbGroup {
        let snf = smith_normal_form(&self.relations);
        let factors = snf.invariant_factors();
        let torsion: Vec<u64> = factors
            .iter()
            .take(snf.rank)
            .filter(|&&d| d > 1)
            .map(|&d| d as u64)
            .collect();
        FinAbGroup {
            free_rank: self.generators - snf.rank,
            torsion,
        }
    }

    /// Whether the vector represents zero.
    pub fn is_zero(&self, v: &[i64]) -> bool {
        in_column_span(&self.relations, v)
    }
}

/// A homomorphism between presented groups, given on generators: column
/// `j` of `matrix` is the image of source generator `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: Presentation,
    target: Presentation,
    matrix: Matrix,
}

impl GroupHom {
    pub fn new(source: Presentation, target: Presentation, matrix: Matrix) -> Result<Self, AbelianError> {
        if matrix.rows() != target.generators || matrix.cols() != source.generators {
            return Err(AbelianError::Shape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                expected_rows: target.generators,
                expected_cols: source.generators,
            });
        }
        let images = &matrix * &source.relations;
        if let Some(j) = images.columns().position(|c| !target.is_zero(&c)) {
            return Err(AbelianError::IllDefined(j));
        }
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    /// Convenience for maps between direct sums of cyclic groups.
    pub fn between_cyclic(source: &[u64], target: &[u64], matrix: Matrix) -> Result<Self, AbelianError> {
        Self::new(
            Presentation::cyclic_sum(source),
            Presentation::cyclic_sum(target),
            matrix,
        )
    }

    pub fn zero(source: Presentation, target: Presentation) -> Self {
        let matrix = Matrix::zeros(target.generators, source.generators);
        GroupHom {
            source,
            target,
            matrix,
        }
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.mul_vec(v)
    }

    /// Basis of `{x in Z^g : h(x) = 0 in the target}`, which contains the
    /// source relations.
    fn kernel_lattice(&self) -> Matrix {
        let g = self.source.generators;
        let stacked = self.matrix.hconcat(&self.target.relations);
        let k = kernel_basis(&stacked);
        column_basis(&k.take_rows(0..g))
    }

    pub fn kernel(&self) -> FinAbGroup {
        let basis = self.kernel_lattice();
        let rels: Vec<Vec<i64>> = self
            .source
            .relations
            .columns()
            .map(|r| solve(&basis, &r).expect("source relations lie in the kernel"))
            .collect();
        Presentation::new(basis.cols(), Matrix::from_columns(basis.cols(), &rels)).group()
    }

    pub fn image(&self) -> FinAbGroup {
        Presentation::new(self.source.generators, self.kernel_lattice()).group()
    }

    pub fn cokernel(&self) -> FinAbGroup {
        Presentation::new(
            self.target.generators,
            self.target.relations.hconcat(&self.matrix),
        )
        .group()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.columns().all(|c| self.target.is_zero(&c))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom, AbelianError> {
        if self.target.generators != next.source.generators {
            return Err(AbelianError::Mismatch(0, 1));
        }
        Ok(GroupHom {
            source: self.source.clone(),
            target: next.target.clone(),
            matrix: &next.matrix * &self.matrix,
        })
    }
}

/// Checks `im(h_i) = ker(h_{i+1})` at every interior node of
/// `A_0 -> A_1 -> ... -> A_m`.
pub fn verify_exact(segment: &[GroupHom]) -> Result<bool, AbelianError> {
    for (i, w) in segment.windows(2).enumerate() {
        let (f, g) = (&w[0], &w[1]);
        if f.target != g.source {
            return Err(AbelianError::Mismatch(i, i + 1));
        }
    }
    for w in segment.windows(2) {
        let (f, g) = (&w[0], &w[1]);
        if !f.then(g)?.is_zero() {
            return Ok(false);
        }
        let image = f.matrix.hconcat(&f.target.relations);
        if !g.kernel_lattice().columns().all(|k| in_column_span(&image, &k)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Elementwise arithmetic in `Z/o_1 + ... + Z/o_g` (`o_i = 0` meaning `Z`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSum {
    orders: Vec<u64>,
}

impl CyclicSum {
    pub fn new(orders: Vec<u64>) -> Self {
        CyclicSum { orders }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_finite(&self) -> bool {
        self.orders.iter().all(|&o| o != 0)
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.orders.len()]
    }

    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.orders.len(), "element has wrong rank");
        v.iter()
            .zip(&self.orders)
            .map(|(&x, &o)| if o == 0 { x } else { x.rem_euclid(o as i64) })
            .collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, c: i64, a: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().map(|x| c * x).collect();
        self.reduce(&s)
    }

    pub fn is_zero(&self, a: &[i64]) -> bool {
        self.reduce(a).iter().all(|&x| x == 0)
    }

    /// Order of an element; `None` for elements of infinite order.
    pub fn order_of(&self, a: &[i64]) -> Option<u64> {
        let a = self.reduce(a);
        let mut order = 1u64;
        for (&x, &o) in a.iter().zip(&self.orders) {
            if x == 0 {
                continue;
            }
            if o == 0 {
                return None;
            }
            order = order.lcm(&(o / (x as u64).gcd(&o)));
        }
        Some(order)
    }

    /// All elements, in lexicographic order of coordinates. Finite groups
    /// only.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let mut out = vec![vec![]];
        for &o in &self.orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..o as i64).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// The subgroup generated by `gens`, as a set of reduced elements.
    /// Generators must have finite order.
    pub fn subgroup(&self, gens: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
        let mut set: BTreeSet<Vec<i64>> = BTreeSet::from([self.zero()]);
        let mut frontier = vec![self.zero()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    pub fn group(&self) -> FinAbGroup {
        FinAbGroup::from_orders(&self.orders)
    }
}

/// What is known about a Toda bracket `<a, g, f>` in some stem: a set of
/// representatives and the indeterminacy subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BracketFact {
    pub bracket: [String; 3],
    pub value_set: Vec<Vec<i64>>,
    pub indeterminacy: Vec<Vec<i64>>,
    pub contains_zero: bool,
    pub provenance: String,
}

impl BracketFact {
    /// Records a bracket whose values live in `stem`; `contains_zero` is
    /// derived from whether a value lies in the indeterminacy subgroup.
    pub fn new(
        bracket: [&str; 3],
        stem: &CyclicSum,
        value_set: Vec<Vec<i64>>,
        indeterminacy: Vec<Vec<i64>>,
        provenance: &str,
    ) -> Self {
        let value_set: Vec<Vec<i64>> = value_set.iter().map(|v| stem.reduce(v)).collect();
        let subgroup = stem.subgroup(&indeterminacy);
        let contains_zero = value_set.iter().any(|v| subgroup.contains(v));
        BracketFact {
            bracket: bracket.map(str::to_string),
            value_set,
            indeterminacy: subgroup.into_iter().collect(),
            contains_zero,
            provenance: provenance.to_string(),
        }
    }

    /// A bracket known only through whether it contains zero.
    pub fn assumed(bracket: [&str; 3], contains_zero: bool, provenance: &str) -> Self {
        BracketFact {
            bracket: bracket.map(str::to_string),
            value_set: vec![],
            indeterminacy: vec![],
            contains_zero,
            provenance: provenance.to_string(),
        }
    }
}

/// Classifies the extension `0 -> sub -> E -> quot -> 0` of finite cyclic
/// groups whose class is detected by `bracket`: split iff the bracket
/// contains zero. A nonsplit answer is only unique for `Z/2` by `Z/2`.
pub fn classify_cyclic_extension(
    sub: &FinAbGroup,
    quot: &FinAbGroup,
    bracket: &BracketFact,
) -> Result<FinAbGroup, AbelianError> {
    for g in [sub, quot] {
        if !g.is_finite_cyclic() {
            return Err(AbelianError::NotCyclic(g.clone()));
        }
    }
    let (m, a) = (sub.torsion[0], quot.torsion[0]);
    if bracket.contains_zero {
        return Ok(FinAbGroup::from_orders(&[m, a]));
    }
    if m == 2 && a == 2 {
        return Ok(FinAbGroup::cyclic(4));
    }
    Err(AbelianError::AmbiguousExtension {
        sub: sub.clone(),
        quot: quot.clone(),
    })
}
