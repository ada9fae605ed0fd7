//! Recorded stable-stem data and a step-by-step replay of the computation
//! `Tors Ω_8^{O<7>}(CP^1; ξ) ≅ Z/4`.
//!
//! Stable stems are not computed here. The ledger file stores group orders,
//! named generators, the relevant composition maps and one Toda bracket, each
//! with a provenance string. The replay consumes that data and checks every
//! deduction mechanically with the group engine, so a wrong or perturbed
//! entry makes a specific step fail.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    classify_cyclic_extension, verify_exact, AbelianError, BracketFact, CyclicSum, FinAbGroup,
    GroupHom, Matrix, Presentation,
};

/// The ledger shipped with the crate.
pub const SHIPPED_LEDGER: &str = include_str!("../../data/stable_stems.toml");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("ledger is not valid TOML: {0}")]
    Parse(String),
    #[error("entry {0:?} is defined twice")]
    Duplicate(String),
    #[error("entry {entry:?} refers to unknown group {group:?}")]
    UnknownGroup { entry: String, group: String },
    #[error("group {name:?} has {orders} cyclic summands but {generators} generator names")]
    GeneratorCount {
        name: String,
        orders: usize,
        generators: usize,
    },
    #[error("element {element:?} in {entry:?} has the wrong number of coordinates")]
    ElementRank { entry: String, element: Vec<i64> },
    #[error("homomorphism {name:?}: {source}")]
    Hom { name: String, source: AbelianError },
}

#[derive(Debug, Deserialize)]
struct RawLedger {
    sign_hypothesis: String,
    #[serde(default)]
    group: Vec<RawGroup>,
    #[serde(default)]
    hom: Vec<RawHom>,
    #[serde(default)]
    subgroup: Vec<RawSubgroup>,
    #[serde(default)]
    bracket: Vec<RawBracket>,
}

#[derive(Debug, Deserialize)]
struct RawGroup {
    name: String,
    orders: Vec<u64>,
    generators: Vec<String>,
    provenance: String,
}

#[derive(Debug, Deserialize)]
struct RawHom {
    name: String,
    source: String,
    target: String,
    matrix: Vec<Vec<i64>>,
    provenance: String,
}

#[derive(Debug, Deserialize)]
struct RawSubgroup {
    name: String,
    group: String,
    generators: Vec<Vec<i64>>,
    provenance: String,
}

#[derive(Debug, Deserialize)]
struct RawBracket {
    name: String,
    triple: [String; 3],
    stem: String,
    values: Vec<Vec<i64>>,
    provenance: String,
}

/// A named group with a chosen cyclic decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub name: String,
    pub group: FinAbGroup,
    pub orders: Vec<u64>,
    pub generators: Vec<String>,
    pub provenance: String,
}

impl LedgerEntry {
    pub fn elements(&self) -> CyclicSum {
        CyclicSum::new(self.orders.clone())
    }
}

#[derive(Debug, Clone)]
pub struct LedgerHom {
    pub name: String,
    pub source: String,
    pub target: String,
    pub hom: GroupHom,
    pub provenance: String,
}

#[derive(Debug, Clone)]
pub struct LedgerSubgroup {
    pub name: String,
    pub group: String,
    pub generators: Vec<Vec<i64>>,
    pub provenance: String,
}

#[derive(Debug, Clone)]
pub struct LedgerBracket {
    pub name: String,
    pub triple: [String; 3],
    pub stem: String,
    pub values: Vec<Vec<i64>>,
    pub provenance: String,
}

#[derive(Debug, Clone)]
pub struct Ledger {
    pub sign_hypothesis: String,
    groups: BTreeMap<String, LedgerEntry>,
    homs: BTreeMap<String, LedgerHom>,
    subgroups: BTreeMap<String, LedgerSubgroup>,
    brackets: BTreeMap<String, LedgerBracket>,
}

fn insert_unique<T>(map: &mut BTreeMap<String, T>, name: &str, value: T) -> Result<(), LedgerError> {
    if map.insert(name.to_string(), value).is_some() {
        return Err(LedgerError::Duplicate(name.to_string()));
    }
    Ok(())
}

impl Ledger {
    pub fn shipped() -> Self {
        Self::from_toml(SHIPPED_LEDGER).expect("shipped ledger is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, LedgerError> {
        let raw: RawLedger = toml::from_str(text).map_err(|e| LedgerError::Parse(e.to_string()))?;
        let mut groups = BTreeMap::new();
        for g in raw.group {
            if g.orders.len() != g.generators.len() {
                return Err(LedgerError::GeneratorCount {
                    name: g.name,
                    orders: g.orders.len(),
                    generators: g.generators.len(),
                });
            }
            let entry = LedgerEntry {
                group: FinAbGroup::from_orders(&g.orders),
                name: g.name.clone(),
                orders: g.orders,
                generators: g.generators,
                provenance: g.provenance,
            };
            insert_unique(&mut groups, &g.name, entry)?;
        }
        let lookup = |entry: &str, group: &str| {
            groups.get(group).ok_or_else(|| LedgerError::UnknownGroup {
                entry: entry.to_string(),
                group: group.to_string(),
            })
        };
        let check_rank = |entry: &str, g: &LedgerEntry, v: &[i64]| {
            if v.len() != g.orders.len() {
                return Err(LedgerError::ElementRank {
                    entry: entry.to_string(),
                    element: v.to_vec(),
                });
            }
            Ok(())
        };

        let mut homs = BTreeMap::new();
        for h in raw.hom {
            let source = lookup(&h.name, &h.source)?;
            let target = lookup(&h.name, &h.target)?;
            let matrix = Matrix::from_rows_with_cols(
                &h.matrix,
                h.matrix.first().map_or(source.orders.len(), Vec::len),
            );
            let hom = GroupHom::between_cyclic(&source.orders, &target.orders, matrix)
                .map_err(|source| LedgerError::Hom {
                    name: h.name.clone(),
                    source,
                })?;
            let entry = LedgerHom {
                name: h.name.clone(),
                source: h.source,
                target: h.target,
                hom,
                provenance: h.provenance,
            };
            insert_unique(&mut homs, &h.name, entry)?;
        }

        let mut subgroups = BTreeMap::new();
        for s in raw.subgroup {
            let g = lookup(&s.name, &s.group)?;
            for v in &s.generators {
                check_rank(&s.name, g, v)?;
            }
            let entry = LedgerSubgroup {
                name: s.name.clone(),
                group: s.group,
                generators: s.generators,
                provenance: s.provenance,
            };
            insert_unique(&mut subgroups, &s.name, entry)?;
        }

        let mut brackets = BTreeMap::new();
        for b in raw.bracket {
            let g = lookup(&b.name, &b.stem)?;
            for v in &b.values {
                check_rank(&b.name, g, v)?;
            }
            let entry = LedgerBracket {
                name: b.name.clone(),
                triple: b.triple,
                stem: b.stem,
                values: b.values,
                provenance: b.provenance,
            };
            insert_unique(&mut brackets, &b.name, entry)?;
        }

        Ok(Ledger {
            sign_hypothesis: raw.sign_hypothesis,
            groups,
            homs,
            subgroups,
            brackets,
        })
    }

    pub fn groups(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.groups.values()
    }

    pub fn group(&self, name: &str) -> Result<&LedgerEntry, String> {
        self.groups
            .get(name)
            .ok_or_else(|| format!("ledger has no group {name:?}"))
    }

    pub fn hom(&self, name: &str) -> Result<&LedgerHom, String> {
        self.homs
            .get(name)
            .ok_or_else(|| format!("ledger has no homomorphism {name:?}"))
    }

    pub fn subgroup(&self, name: &str) -> Result<&LedgerSubgroup, String> {
        self.subgroups
            .get(name)
            .ok_or_else(|| format!("ledger has no subgroup {name:?}"))
    }

    pub fn bracket(&self, name: &str) -> Result<&LedgerBracket, String> {
        self.brackets
            .get(name)
            .ok_or_else(|| format!("ledger has no bracket {name:?}"))
    }

    /// Replaces the recorded values of a bracket. Used for counterfactual
    /// runs.
    pub fn override_bracket(&mut self, name: &str, values: Vec<Vec<i64>>) -> Result<(), String> {
        let b = self
            .brackets
            .get_mut(name)
            .ok_or_else(|| format!("ledger has no bracket {name:?}"))?;
        b.values = values;
        Ok(())
    }

    /// Replaces the cyclic orders of a group (generator names are padded or
    /// truncated). Homomorphisms touching the group are not revalidated.
    pub fn override_group_orders(&mut self, name: &str, orders: Vec<u64>) -> Result<(), String> {
        let g = self
            .groups
            .get_mut(name)
            .ok_or_else(|| format!("ledger has no group {name:?}"))?;
        g.generators.resize(orders.len(), "g".to_string());
        g.group = FinAbGroup::from_orders(&orders);
        g.orders = orders;
        Ok(())
    }
}

/// Alternative inputs for exercising the replay machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Counterfactual {
    /// Pretend `<nu^2, 2, eta> = {0, eta sigma}`, which forces the bracket
    /// deciding the extension to contain zero.
    SplitBracket,
}

impl Counterfactual {
    pub fn label(self) -> &'static str {
        match self {
            Counterfactual::SplitBracket => "split-bracket",
        }
    }

    fn apply(self, ledger: &mut Ledger) -> Result<(), String> {
        match self {
            Counterfactual::SplitBracket => {
                ledger.override_bracket("nu2_2_eta", vec![vec![0, 0], vec![1, 0]])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Pass,
    Fail,
    /// The step does not follow from the data, without contradicting it.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub id: &'static str,
    pub claim: &'static str,
    pub citation: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationReport {
    pub counterfactual: Option<&'static str>,
    pub steps: Vec<DerivationStep>,
    /// `pi_8^s(C_eta)`, the framed bordism of `CP^1` twisted by `xi`.
    pub c_eta: Option<FinAbGroup>,
    /// `Tors Ω_8^{O<7>}(CP^1; xi)`.
    pub torsion_cp1: Option<FinAbGroup>,
}

impl DerivationReport {
    /// No step failed and every step was reached.
    pub fn all_passed(&self) -> bool {
        self.steps.len() == STEP_COUNT && self.steps.iter().all(|s| s.outcome == Outcome::Pass)
    }

    pub fn failed_step(&self) -> Option<&DerivationStep> {
        self.steps.iter().find(|s| s.outcome == Outcome::Fail)
    }
}

const STEP_COUNT: usize = 6;

struct StepResult {
    outcome: Outcome,
    detail: String,
}

fn pass(detail: String) -> Result<StepResult, String> {
    Ok(StepResult {
        outcome: Outcome::Pass,
        detail,
    })
}

fn fmt_elements(g: &LedgerEntry, elems: &BTreeSet<Vec<i64>>) -> String {
    let show = |v: &Vec<i64>| -> String {
        let terms: Vec<String> = v
            .iter()
            .zip(&g.generators)
            .filter(|(&c, _)| c != 0)
            .map(|(&c, name)| if c == 1 { name.clone() } else { format!("{c} {name}") })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    };
    let items: Vec<String> = elems.iter().map(show).collect();
    format!("{{{}}}", items.join(", "))
}

/// Image of a ledger homomorphism as a set of elements of its target.
fn image_set(ledger: &Ledger, h: &LedgerHom) -> Result<BTreeSet<Vec<i64>>, String> {
    let src = ledger.group(&h.source)?.elements();
    let tgt = ledger.group(&h.target)?.elements();
    let gens: Vec<Vec<i64>> = h.hom.matrix().columns().map(|c| tgt.reduce(&c)).collect();
    if !src.is_finite() {
        return Err(format!("{} has an infinite source", h.name));
    }
    Ok(tgt.subgroup(&gens))
}

/// Working state threaded through the steps.
#[derive(Default)]
struct Derivation {
    sub: Option<FinAbGroup>,
    quot: Option<FinAbGroup>,
    bracket: Option<BracketFact>,
    extension: Option<FinAbGroup>,
    torsion: Option<FinAbGroup>,
}

type StepFn = fn(&Ledger, &mut Derivation) -> Result<StepResult, String>;

const STEPS: [(&str, &str, &str, StepFn); STEP_COUNT] = [
    (
        "eta_on_pi6",
        "composition with eta, pi_6 -> pi_7, is the zero map",
        "Lemma Omega_8(CP1), Toda",
        step_eta_on_pi6,
    ),
    (
        "c_eta_sequence",
        "0 -> Z/2([epsilon]) -> pi_8(C_eta) -> Z/2 -> 0 is exact",
        "Lemma Omega_8(CP1)",
        step_c_eta_sequence,
    ),
    (
        "bracket",
        "<eta, nu^2, 2> is determined by the Jacobi identity",
        "Toda Jacobi identity; Lemma Omega_8(CP1)",
        step_bracket,
    ),
    (
        "extension",
        "the extension for pi_8(C_eta) is decided by the bracket",
        "Lemma extension_and_Toda",
        step_extension,
    ),
    (
        "comparison",
        "Tors Omega_8^{O<7>}(CP^1; xi) is isomorphic to pi_8(C_eta)",
        "Lemma pi_*(MO8); Lemma Omega_8(CP1)",
        step_comparison,
    ),
    (
        "exotic_sphere",
        "Sigma_ex represents 2a, so it dies in any torsion group of exponent 2",
        "Proposition i_CP1",
        step_exotic_sphere,
    ),
];

fn step_eta_on_pi6(ledger: &Ledger, _: &mut Derivation) -> Result<StepResult, String> {
    let pi4 = ledger.group("pi_4")?;
    if !pi4.group.is_trivial() {
        return Err(format!(
            "eta nu lies in pi_4 = {}, which is not known to vanish",
            pi4.group
        ));
    }
    let eta = ledger.hom("eta_6_7")?;
    if !eta.hom.is_zero() {
        return Err("ledger records eta nu^2 != 0 although eta nu = 0 in pi_4".to_string());
    }
    pass("eta nu^2 = (eta nu) nu and eta nu lies in pi_4 = 0".to_string())
}

fn step_c_eta_sequence(ledger: &Ledger, state: &mut Derivation) -> Result<StepResult, String> {
    let sub = ledger.hom("eta_7_8")?.hom.cokernel();
    let quot = ledger.hom("eta_6_7")?.hom.kernel();
    if sub != FinAbGroup::cyclic(2) || quot != FinAbGroup::cyclic(2) {
        return Err(format!(
            "expected pi_8/eta pi_7 = Z/2 and ker(eta on pi_6) = Z/2, got {sub} and {quot}"
        ));
    }
    let detail = format!("pi_8/eta pi_7 = {sub} (class of epsilon), ker(eta: pi_6 -> pi_7) = {quot}");
    state.sub = Some(sub);
    state.quot = Some(quot);
    pass(detail)
}

fn step_bracket(ledger: &Ledger, state: &mut Derivation) -> Result<StepResult, String> {
    let pi1 = ledger.group("pi_1")?;
    let pi5 = ledger.group("pi_5")?;
    let pi6 = ledger.group("pi_6")?;
    let pi8 = ledger.group("pi_8")?;
    let stem = pi8.elements();

    // <2, eta, nu^2> is contained in <2, eta, nu> nu and <2, eta, nu> lies in pi_5
    if !pi5.group.is_trivial() {
        return Err(format!("<2, eta, nu> lies in pi_5 = {}, not known to vanish", pi5.group));
    }
    let two_eta_nu2: BTreeSet<Vec<i64>> = BTreeSet::from([stem.zero()]);

    let recorded = ledger.bracket("nu2_2_eta")?;
    if recorded.stem != "pi_8" {
        return Err(format!("<nu^2, 2, eta> recorded in {} instead of pi_8", recorded.stem));
    }
    let nu2_two_eta: BTreeSet<Vec<i64>> = recorded.values.iter().map(|v| stem.reduce(v)).collect();
    if nu2_two_eta.is_empty() {
        return Err("<nu^2, 2, eta> has no recorded values".to_string());
    }

    // indeterminacy of <eta, nu^2, 2> in pi_8: eta pi_7 + 2 pi_8
    let mut indeterminacy_gens: Vec<Vec<i64>> =
        image_set(ledger, ledger.hom("eta_7_8")?)?.into_iter().collect();
    indeterminacy_gens.extend(stem.elements().iter().map(|x| stem.scale(2, x)));
    let indeterminacy = stem.subgroup(&indeterminacy_gens);

    // signs may be ignored only when everything has order <= 2
    let eta = pi1.elements();
    let nu2 = pi6.elements();
    let small = |g: &CyclicSum, v: &[i64]| g.order_of(v).is_some_and(|o| o <= 2);
    let orders_ok = pi1.generators.first() == Some(&"eta".to_string())
        && small(&eta, &[1])
        && pi6.generators.first() == Some(&"nu^2".to_string())
        && small(&nu2, &[1])
        && nu2_two_eta.iter().chain(&indeterminacy).all(|v| small(&stem, v));
    if !orders_ok {
        return Err(format!(
            "sign hypothesis fails ({}): some bracket element has order > 2",
            ledger.sign_hypothesis
        ));
    }

    // Jacobi: 0 in <eta, nu^2, 2> + <2, eta, nu^2> + <nu^2, 2, eta>, so
    // <eta, nu^2, 2> meets the sums of the other two; it is a coset of its
    // indeterminacy, so those sums must all lie in one coset
    let sums: BTreeSet<Vec<i64>> = two_eta_nu2
        .iter()
        .flat_map(|x| nu2_two_eta.iter().map(|y| stem.add(x, y)))
        .collect();
    let witness = sums.iter().next().expect("nonempty").clone();
    let coset: BTreeSet<Vec<i64>> = indeterminacy.iter().map(|i| stem.add(&witness, i)).collect();
    if !sums.is_subset(&coset) {
        return Err("Jacobi sums do not lie in a single coset of the indeterminacy".to_string());
    }
    let fact = BracketFact::new(
        ["eta", "nu^2", "2"],
        &stem,
        coset.iter().cloned().collect(),
        indeterminacy.iter().cloned().collect(),
        "Jacobi identity from <2, eta, nu^2> = {0} and the recorded <nu^2, 2, eta>",
    );

    // where the bracket lands in pi_8 / eta pi_7
    let eta_image = image_set(ledger, ledger.hom("eta_7_8")?)?;
    let in_quotient_zero = coset.iter().all(|v| eta_image.contains(v));
    let detail = format!(
        "<2, eta, nu^2> = {{0}}, <nu^2, 2, eta> = {}, indeterminacy {}, so <eta, nu^2, 2> = {} ({}; {} in pi_8/eta pi_7)",
        fmt_elements(pi8, &nu2_two_eta),
        fmt_elements(pi8, &indeterminacy),
        fmt_elements(pi8, &coset),
        if fact.contains_zero { "contains 0" } else { "does not contain 0" },
        if in_quotient_zero { "zero" } else { "the generator" },
    );
    let outcome = if fact.contains_zero == in_quotient_zero {
        Outcome::Pass
    } else {
        return Err("bracket membership of 0 disagrees with its image mod eta pi_7".to_string());
    };
    state.bracket = Some(fact);
    Ok(StepResult { outcome, detail })
}

/// `0 -> Z/m -> E -> Z/a -> 0` with the evident maps, for `E` cyclic of
/// order `m a` or `E = Z/m + Z/a`.
fn realize_extension(
    m: u64,
    a: u64,
    e: &FinAbGroup,
) -> Result<(Vec<u64>, Vec<GroupHom>), AbelianError> {
    let (e_orders, incl, proj) = if e.is_finite_cyclic() {
        (vec![m * a], Matrix::from_rows(&[[a as i64]]), Matrix::from_rows(&[[1]]))
    } else {
        (
            vec![m, a],
            Matrix::from_rows(&[[1], [0]]),
            Matrix::from_rows(&[[0, 1]]),
        )
    };
    let seq = vec![
        GroupHom::between_cyclic(&[], &[m], Matrix::zeros(1, 0))?,
        GroupHom::between_cyclic(&[m], &e_orders, incl)?,
        GroupHom::between_cyclic(&e_orders, &[a], proj)?,
        GroupHom::between_cyclic(&[a], &[], Matrix::zeros(0, 1))?,
    ];
    Ok((e_orders, seq))
}

fn step_extension(_: &Ledger, state: &mut Derivation) -> Result<StepResult, String> {
    let (Some(sub), Some(quot), Some(bracket)) = (&state.sub, &state.quot, &state.bracket) else {
        return Err("earlier steps did not produce their data".to_string());
    };
    let e = classify_cyclic_extension(sub, quot, bracket).map_err(|e| e.to_string())?;
    let (_, seq) =
        realize_extension(sub.torsion[0], quot.torsion[0], &e).map_err(|e| e.to_string())?;
    if !verify_exact(&seq).map_err(|e| e.to_string())? {
        return Err(format!("realized sequence 0 -> {sub} -> {e} -> {quot} -> 0 is not exact"));
    }
    let detail = format!(
        "{} extension, pi_8(C_eta) = {e}",
        if bracket.contains_zero { "split" } else { "non-split" }
    );
    state.extension = Some(e);
    pass(detail)
}

fn step_comparison(ledger: &Ledger, state: &mut Derivation) -> Result<StepResult, String> {
    let Some(e) = &state.extension else {
        return Err("no extension computed".to_string());
    };
    let pi8 = ledger.group("pi_8")?;
    let string7 = ledger.group("string_7")?;
    let string8 = ledger.group("string_8")?;
    let theta8 = ledger.group("theta_8")?;
    let stem = pi8.elements();

    let im_j = ledger.subgroup("im_J_8")?;
    if im_j.group != "pi_8" {
        return Err("im J_8 is not recorded as a subgroup of pi_8".to_string());
    }
    let im_j = stem.subgroup(&im_j.generators);
    let eta_image = image_set(ledger, ledger.hom("eta_7_8")?)?;
    if im_j != eta_image {
        return Err(format!(
            "im J_8 = {} differs from eta pi_7 = {}",
            fmt_elements(pi8, &im_j),
            fmt_elements(pi8, &eta_image)
        ));
    }

    // forget_8: pi_8 -> Omega_8^{O<7>} kills exactly im J_8 and hits the torsion
    let forget8 = ledger.hom("forget_8")?;
    let target = string8.elements();
    let kernel: BTreeSet<Vec<i64>> = stem
        .elements()
        .into_iter()
        .filter(|x| target.is_zero(&forget8.hom.apply(x)))
        .collect();
    if kernel != im_j {
        return Err("kernel of pi_8 -> Omega_8^{O<7>} is not im J_8".to_string());
    }
    let image_order = pi8.group.order().expect("finite") / kernel.len() as u64;
    let torsion8 = string8.group.torsion_subgroup();
    if Some(image_order) != torsion8.order() {
        return Err(format!(
            "pi_8 -> Omega_8^{{O<7>}} has image of order {image_order}, torsion is {torsion8}"
        ));
    }
    if theta8.group != torsion8 {
        return Err(format!("Theta_8 = {} but Tors Omega_8^{{O<7>}} = {torsion8}", theta8.group));
    }

    let forget6 = &ledger.hom("forget_6")?.hom;
    if !(forget6.kernel().is_trivial() && forget6.cokernel().is_trivial()) {
        return Err("Omega_6^fr -> Omega_6^{O<7>} is not an isomorphism".to_string());
    }
    if !string7.group.is_trivial() {
        return Err(format!("Omega_7^{{O<7>}} = {} does not vanish", string7.group));
    }

    state.torsion = Some(e.clone());
    pass(format!(
        "left map induces pi_8/im J_8 = {torsion8} = Theta_8, right map is an isomorphism, \
         Omega_7 = 0 makes the bottom row short exact; five lemma gives Tors = {e}"
    ))
}

fn step_exotic_sphere(_: &Ledger, state: &mut Derivation) -> Result<StepResult, String> {
    let (Some(sub), Some(quot), Some(e)) = (&state.sub, &state.quot, &state.torsion) else {
        return Err("no torsion group computed".to_string());
    };
    let (m, a) = (sub.torsion[0], quot.torsion[0]);
    let (orders, seq) = realize_extension(m, a, e).map_err(|e| e.to_string())?;
    let incl = &seq[1];
    let group = CyclicSum::new(orders);
    let sigma = group.reduce(&incl.apply(&[1]));
    let halves: Vec<Vec<i64>> = group
        .elements()
        .into_iter()
        .filter(|y| group.scale(2, y) == sigma)
        .collect();
    if halves.is_empty() {
        return Ok(StepResult {
            outcome: Outcome::Inconclusive,
            detail: format!("Sigma_ex = {sigma:?} is not divisible by 2 in {e}"),
        });
    }
    // every map to Z/2 kills Sigma_ex
    let presentation = Presentation::cyclic_sum(group.orders());
    for bits in 0..(1u32 << group.rank()) {
        let row: Vec<i64> = (0..group.rank()).map(|i| i64::from((bits >> i) & 1)).collect();
        let Ok(h) = GroupHom::new(
            presentation.clone(),
            Presentation::cyclic_sum(&[2]),
            Matrix::from_rows(&[row.as_slice()]),
        ) else {
            continue;
        };
        if !h.target().is_zero(&h.apply(&sigma)) {
            return Err("a map to Z/2 does not kill Sigma_ex".to_string());
        }
    }
    pass(format!(
        "Sigma_ex = 2a with a = {:?} a generator of {e}; i_*(Sigma_ex) = 2 i_*(a) = 0",
        halves[0]
    ))
}

/// Replays the derivation on a ledger, stopping at the first failed step.
pub fn replay(ledger: &Ledger, counterfactual: Option<Counterfactual>) -> DerivationReport {
    let mut ledger = ledger.clone();
    let mut steps = Vec::new();
    let mut state = Derivation::default();
    if let Some(cf) = counterfactual {
        if let Err(e) = cf.apply(&mut ledger) {
            steps.push(DerivationStep {
                id: "counterfactual",
                claim: "apply counterfactual override",
                citation: "",
                outcome: Outcome::Fail,
                detail: e,
            });
        }
    }
    if steps.is_empty() {
        for (id, claim, citation, run) in STEPS {
            let result = run(&ledger, &mut state).unwrap_or_else(|detail| StepResult {
                outcome: Outcome::Fail,
                detail,
            });
            let failed = result.outcome == Outcome::Fail;
            steps.push(DerivationStep {
                id,
                claim,
                citation,
                outcome: result.outcome,
                detail: result.detail,
            });
            if failed {
                break;
            }
        }
    }
    DerivationReport {
        counterfactual: counterfactual.map(Counterfactual::label),
        steps,
        c_eta: state.extension,
        torsion_cp1: state.torsion,
    }
}

/// Replays the derivation with the shipped ledger.
pub fn replay_shipped() -> DerivationReport {
    replay(&Ledger::shipped(), None)
}

/// Report for a ledger file that did not load.
pub fn load_failure(error: &LedgerError) -> DerivationReport {
    DerivationReport {
        counterfactual: None,
        steps: vec![DerivationStep {
            id: "load",
            claim: "ledger file parses and is internally consistent",
            citation: "",
            outcome: Outcome::Fail,
            detail: error.to_string(),
        }],
        c_eta: None,
        torsion_cp1: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_ledger_gives_z4() {
        let report = replay_shipped();
        assert!(report.all_passed(), "{report:#?}");
        assert_eq!(report.c_eta, Some(FinAbGroup::cyclic(4)));
        assert_eq!(report.torsion_cp1, Some(FinAbGroup::cyclic(4)));
        assert_eq!(report.counterfactual, None);
    }

    #[test]
    fn shipped_ledger_contents() {
        let l = Ledger::shipped();
        assert_eq!(l.group("pi_7").unwrap().group, FinAbGroup::cyclic(240));
        assert_eq!(l.group("pi_8").unwrap().group, FinAbGroup::from_orders(&[2, 2]));
        assert_eq!(
            l.group("string_8").unwrap().group,
            FinAbGroup::new(1, vec![2]).unwrap()
        );
        assert!(l.groups().all(|g| !g.provenance.is_empty()));
    }

    #[test]
    fn split_counterfactual() {
        let report = replay(&Ledger::shipped(), Some(Counterfactual::SplitBracket));
        assert_eq!(report.counterfactual, Some("split-bracket"));
        assert_eq!(report.c_eta, Some(FinAbGroup::from_orders(&[2, 2])));
        assert_eq!(report.torsion_cp1, Some(FinAbGroup::from_orders(&[2, 2])));
        assert!(report.failed_step().is_none());
        assert_eq!(report.steps.last().unwrap().outcome, Outcome::Inconclusive);
        assert!(!report.all_passed());
    }

    #[test]
    fn nonvanishing_pi4_breaks_first_step() {
        let mut l = Ledger::shipped();
        l.override_group_orders("pi_4", vec![2]).unwrap();
        let report = replay(&l, None);
        assert_eq!(report.steps.len(), 1);
        assert_eq!(report.failed_step().unwrap().id, "eta_on_pi6");
        assert_eq!(report.torsion_cp1, None);
    }

    #[test]
    fn nonvanishing_pi5_breaks_bracket_step() {
        let mut l = Ledger::shipped();
        l.override_group_orders("pi_5", vec![3]).unwrap();
        let report = replay(&l, None);
        assert_eq!(report.failed_step().unwrap().id, "bracket");
    }

    #[test]
    fn wrong_image_of_j_breaks_comparison() {
        let text = SHIPPED_LEDGER.replace("generators = [[1, 0]]", "generators = [[0, 1]]");
        let report = replay(&Ledger::from_toml(&text).unwrap(), None);
        assert_eq!(report.failed_step().unwrap().id, "comparison");
    }

    #[test]
    fn nonzero_eta_on_pi6_is_inconsistent() {
        let text = SHIPPED_LEDGER.replace(
            "source = \"pi_6\"\ntarget = \"pi_7\"\nmatrix = [[0]]",
            "source = \"pi_6\"\ntarget = \"pi_7\"\nmatrix = [[120]]",
        );
        let report = replay(&Ledger::from_toml(&text).unwrap(), None);
        assert_eq!(report.failed_step().unwrap().id, "eta_on_pi6");
    }

    #[test]
    fn corrupted_files_are_rejected() {
        assert!(matches!(Ledger::from_toml("not = [valid"), Err(LedgerError::Parse(_))));
        let text = SHIPPED_LEDGER.replace("orders = [240]", "orders = [240, 2]");
        assert!(matches!(
            Ledger::from_toml(&text),
            Err(LedgerError::GeneratorCount { .. })
        ));
        let text = SHIPPED_LEDGER.replace("matrix = [[1], [0]]", "matrix = [[1], [1], [0]]");
        assert!(matches!(Ledger::from_toml(&text), Err(LedgerError::Hom { .. })));
        let text = SHIPPED_LEDGER.replace("target = \"string_6\"", "target = \"string_9\"");
        assert!(matches!(
            Ledger::from_toml(&text),
            Err(LedgerError::UnknownGroup { .. })
        ));
        let text = SHIPPED_LEDGER.replace("values = [[0, 1], [1, 1]]", "values = [[0, 1, 1]]");
        assert!(matches!(
            Ledger::from_toml(&text),
            Err(LedgerError::ElementRank { .. })
        ));
        let report = load_failure(&Ledger::from_toml("x").unwrap_err());
        assert_eq!(report.failed_step().unwrap().id, "load");
    }

    #[test]
    fn missing_entry_fails_its_step() {
        let text = SHIPPED_LEDGER.replace("name = \"nu2_2_eta\"", "name = \"renamed\"");
        let report = replay(&Ledger::from_toml(&text).unwrap(), None);
        let failed = report.failed_step().unwrap();
        assert_eq!(failed.id, "bracket");
        assert!(failed.detail.contains("nu2_2_eta"));
    }
}
