//! Flag-level positivity: Plücker positivity with isotropy, Lusztig-positive
//! sampling along a fixed reduced word for w0, the Marsh-Rietsch cell
//! parametrization, the folding containment check, and the duality between
//! complementary leading flags of a form-preserving matrix.

use crate::linalg::{
    dual_index_map, plucker_vector, projective_ratio, same_span, ExactMatrix, Flag, PluckerVector,
};
use crate::pinning::{
    self, word_product, y_word_product, FactorClass, FactorKind, GroupDescriptor,
};
use crate::report::{CheckResult, Report};
use crate::sampling;
use crate::scalar::QuadScalar;
use crate::weyl::{self, PosClass, Subexpression, System};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PositivityError {
    #[error("matrix fails group membership for the descriptor")]
    Membership,
    #[error("parameter counts must match the subexpression classes")]
    ParamCount,
    #[error("torus parameters must be nonzero")]
    ZeroTorusParam,
    #[error("operation unsupported for this system")]
    UnsupportedSystem,
    #[error("ranks must be strictly increasing and lie in [1, N-1]")]
    BadRanks,
    #[error("base word is not reduced")]
    NotReduced,
    #[error("flag construction failed: {0}")]
    FlagConstruction(String),
}

/// A Lusztig-positive point: the flag of y_{w0-word}(params) at the given
/// ranks, with all parameters strictly positive.
#[derive(Clone, Debug)]
pub struct PositiveSample {
    pub descriptor: GroupDescriptor,
    pub ranks: Vec<usize>,
    pub params: Vec<QuadScalar>,
    pub matrix: ExactMatrix,
    pub flag: Flag,
    pub seed: u64,
}

/// A point of a Deodhar component: the product of the factors
/// x_{i_k}(m_k) sdot_{i_k}^{-1} (kept, length-decreasing), y_{i_k}(t_k)
/// (skipped), sdot_{i_k} (kept, length-increasing) along the base word.
#[derive(Clone, Debug)]
pub struct MRPoint {
    pub subexpr: Subexpression,
    pub m_params: Vec<QuadScalar>,
    pub t_params: Vec<QuadScalar>,
    pub matrix: ExactMatrix,
}

/// Letters of the fixed reduced word for w0 used by all sampling routines:
/// the layered B/C word, or the staircase word for type A.
pub fn w0_letters(g: GroupDescriptor) -> Result<Vec<usize>, PositivityError> {
    match g.weyl_system() {
        Some(System::A(r)) => Ok(weyl::w0_word_a(r).letters),
        Some(sys @ (System::B(_) | System::C(_))) => Ok(weyl::w0_word(sys).letters),
        _ => Err(PositivityError::UnsupportedSystem),
    }
}

fn validate_ranks(ranks: &[usize], ambient: usize) -> Result<(), PositivityError> {
    let increasing = ranks.windows(2).all(|w| w[0] < w[1]);
    if ranks.is_empty() || !increasing || ranks[0] < 1 || *ranks.last().unwrap() >= ambient {
        return Err(PositivityError::BadRanks);
    }
    Ok(())
}

/// Leading-column flag of a group element at the given ranks. With
/// `extended`, the mirror ranks N-k are adjoined and each mirror subspace is
/// verified to be the perp of its partner.
pub fn flag_from_group_element(
    m: &ExactMatrix,
    g: GroupDescriptor,
    ranks: &[usize],
    extended: bool,
) -> Result<Flag, PositivityError> {
    if !pinning::group_membership(m, g) {
        return Err(PositivityError::Membership);
    }
    let ambient = g.ambient();
    validate_ranks(ranks, ambient)?;
    let mut all_ranks: Vec<usize> = ranks.to_vec();
    if extended {
        all_ranks.extend(ranks.iter().map(|&k| ambient - k));
        all_ranks.sort_unstable();
        all_ranks.dedup();
    }
    let flag = Flag::from_matrix(m.clone(), all_ranks)
        .map_err(|e| PositivityError::FlagConstruction(e.to_string()))?;
    if extended {
        if let Some(form) = g.form() {
            for &k in ranks {
                let perp = form
                    .perp(&m.leading_columns(k))
                    .map_err(|e| PositivityError::FlagConstruction(e.to_string()))?;
                if !same_span(&m.leading_columns(ambient - k), &perp) {
                    return Err(PositivityError::FlagConstruction(
                        "mirror subspace is not the perp".into(),
                    ));
                }
            }
        }
    }
    Ok(flag)
}

/// First rank at which the flag fails the requested positivity, with the
/// offending coordinate, or the first non-isotropic rank.
pub fn first_positivity_violation(f: &Flag, g: GroupDescriptor, strict: bool) -> Option<Value> {
    let half_rank = match g {
        GroupDescriptor::A { .. } => usize::MAX,
        GroupDescriptor::C { n } | GroupDescriptor::B { n } | GroupDescriptor::D { n } => n,
    };
    for &k in &f.ranks {
        let v = f.plucker_at(k).sign_normalized();
        let bad = v
            .coords
            .iter()
            .find(|(_, c)| if strict { c.sign() <= 0 } else { c.sign() < 0 });
        if let Some((set, c)) = bad {
            return Some(json!({
                "rank": k,
                "index_set": set,
                "coordinate": c.to_string(),
                "kind": "sign",
            }));
        }
        if k <= half_rank {
            if let Some(form) = g.form() {
                if !form.is_isotropic(&f.subspace(k)).unwrap_or(false) {
                    return Some(json!({"rank": k, "kind": "isotropy"}));
                }
            }
        }
    }
    None
}

/// True iff every rank's Plücker vector is positive (strict) or nonnegative
/// and nonzero (non-strict) after sign normalization, and every subspace of
/// rank at most n is isotropic for the descriptor's form.
pub fn is_plucker_positive_flag(f: &Flag, g: GroupDescriptor, strict: bool) -> bool {
    first_positivity_violation(f, g, strict).is_none()
}

/// Deterministic Lusztig-positive sample: y_{w0-word}(t) with positive
/// seeded rationals, restricted to the leading-column flag at ranks K.
pub fn lusztig_positive_sample(
    g: GroupDescriptor,
    k_set: &[usize],
    seed: u64,
) -> Result<PositiveSample, PositivityError> {
    let letters = w0_letters(g)?;
    let mut rng = sampling::rng(seed);
    let params = sampling::positive_params(&mut rng, letters.len());
    let matrix = y_word_product(g, &letters, &params).expect("valid word");
    let flag = flag_from_group_element(&matrix, g, k_set, false)?;
    Ok(PositiveSample {
        descriptor: g,
        ranks: k_set.to_vec(),
        params,
        matrix,
        flag,
        seed,
    })
}

/// Assemble the Deodhar-rule product for a subexpression. The m parameters
/// run over the length-decreasing kept positions in word order, the t
/// parameters over the skipped positions.
pub fn marsh_rietsch_point(
    subexpr: &Subexpression,
    m_params: &[QuadScalar],
    t_params: &[QuadScalar],
    g: GroupDescriptor,
) -> Result<MRPoint, PositivityError> {
    if g.weyl_system() != Some(subexpr.base.system) {
        return Err(PositivityError::UnsupportedSystem);
    }
    if t_params.iter().any(|t| t.is_zero()) {
        return Err(PositivityError::ZeroTorusParam);
    }
    let classes = subexpr.classification();
    let minus = classes.iter().filter(|&&c| c == PosClass::Minus).count();
    let circ = classes.iter().filter(|&&c| c == PosClass::Circ).count();
    if m_params.len() != minus || t_params.len() != circ {
        return Err(PositivityError::ParamCount);
    }
    let mut kinds = Vec::with_capacity(classes.len());
    let mut params = Vec::with_capacity(classes.len());
    let (mut mi, mut ti) = (0, 0);
    for class in &classes {
        match class {
            PosClass::Minus => {
                kinds.push(FactorKind::XSdotInv);
                params.push(m_params[mi].clone());
                mi += 1;
            }
            PosClass::Circ => {
                kinds.push(FactorKind::Y);
                params.push(t_params[ti].clone());
                ti += 1;
            }
            PosClass::Plus => {
                kinds.push(FactorKind::Sdot);
                params.push(QuadScalar::zero());
            }
        }
    }
    let matrix = word_product(g, &subexpr.base.letters, &kinds, &params).expect("valid word");
    Ok(MRPoint {
        subexpr: subexpr.clone(),
        m_params: m_params.to_vec(),
        t_params: t_params.to_vec(),
        matrix,
    })
}

/// Complete-flag comparison of two invertible matrices via leading-column
/// spans at every rank.
pub fn flags_agree(m1: &ExactMatrix, m2: &ExactMatrix) -> bool {
    debug_assert_eq!(m1.rows(), m2.rows());
    (1..m1.rows()).all(|r| same_span(&m1.leading_columns(r), &m2.leading_columns(r)))
}

/// The folding containment: a Deodhar point of the composite group, built
/// along a distinguished subexpression, equals (as a complete flag) the
/// type-A Deodhar point built along the folded subexpression with
/// parameters transformed by the per-letter coordinate maps. Also checks
/// that the folded classification matches blockwise and that the folded
/// kept product is the ambient realization of the original one.
pub fn fold_cell_containment_check(
    g: GroupDescriptor,
    subexpr: &Subexpression,
    samples: usize,
    seed: u64,
) -> Result<bool, PositivityError> {
    if !matches!(g, GroupDescriptor::C { .. } | GroupDescriptor::B { .. })
        || g.weyl_system() != Some(subexpr.base.system)
    {
        return Err(PositivityError::UnsupportedSystem);
    }
    if !weyl::is_reduced(&subexpr.base) {
        return Err(PositivityError::NotReduced);
    }
    let a_desc = GroupDescriptor::A { ambient: g.ambient() };
    let folded = weyl::fold_subexpression(subexpr).expect("foldable system");

    // Blockwise class agreement.
    let classes = subexpr.classification();
    let folded_classes = folded.classification();
    let mut offset = 0;
    for (k, &i) in subexpr.base.letters.iter().enumerate() {
        let block = weyl::psi_block(subexpr.base.system, i).expect("valid letter").len();
        if folded_classes[offset..offset + block].iter().any(|&c| c != classes[k]) {
            return Ok(false);
        }
        offset += block;
    }

    // The folded kept product is the ambient image of the kept product.
    let ambient_u = match subexpr.element() {
        u @ weyl::WeylElement::Signed(_) => match g {
            GroupDescriptor::C { .. } => u.to_ambient_even(),
            _ => u.to_ambient_odd(),
        },
        _ => return Err(PositivityError::UnsupportedSystem),
    };
    if folded.element() != weyl::WeylElement::TypeA(ambient_u) {
        return Ok(false);
    }

    let mut rng = sampling::rng(seed);
    for _ in 0..samples {
        let m_params: Vec<QuadScalar> = classes
            .iter()
            .filter(|&&c| c == PosClass::Minus)
            .map(|_| sampling::signed_rational(&mut rng))
            .collect();
        let t_params: Vec<QuadScalar> = classes
            .iter()
            .filter(|&&c| c == PosClass::Circ)
            .map(|_| sampling::signed_rational(&mut rng))
            .collect();
        let phi_point = marsh_rietsch_point(subexpr, &m_params, &t_params, g)?;

        // Expand each composite factor through its folding identity.
        let mut letters = Vec::new();
        let mut kinds = Vec::new();
        let mut params = Vec::new();
        let (mut mi, mut ti) = (0, 0);
        for (k, &i) in subexpr.base.letters.iter().enumerate() {
            match classes[k] {
                PosClass::Minus => {
                    let fold = pinning::fold_identity(g, i, FactorClass::XSdotInv);
                    for (l, p) in fold.target_letters.iter().zip(fold.apply(&m_params[mi])) {
                        letters.push(*l);
                        kinds.push(FactorKind::XSdotInv);
                        params.push(p);
                    }
                    mi += 1;
                }
                PosClass::Circ => {
                    let fold = pinning::fold_identity(g, i, FactorClass::Y);
                    for (l, p) in fold.target_letters.iter().zip(fold.apply(&t_params[ti])) {
                        letters.push(*l);
                        kinds.push(FactorKind::Y);
                        params.push(p);
                    }
                    ti += 1;
                }
                PosClass::Plus => {
                    for l in weyl::psi_block(subexpr.base.system, i).expect("valid letter") {
                        letters.push(l);
                        kinds.push(FactorKind::Sdot);
                        params.push(QuadScalar::zero());
                    }
                }
            }
        }
        let a_point = word_product(a_desc, &letters, &kinds, &params).expect("valid word");
        if !flags_agree(&phi_point.matrix, &a_point) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Forward-direction suite: each Lusztig-positive sample must be strictly
/// Plücker-positive (and isotropic at ranks up to n).
pub fn theorem_forward_report(
    g: GroupDescriptor,
    k_set: &[usize],
    samples: usize,
    seed: u64,
) -> Report {
    let mut report = Report::new("theorem", g.describe(), seed, samples as u64);
    for idx in 0..samples {
        let name = format!("sample.{idx}.plucker-positive");
        match lusztig_positive_sample(g, k_set, seed.wrapping_add(idx as u64)) {
            Ok(sample) => match first_positivity_violation(&sample.flag, g, true) {
                None => report.push(CheckResult::pass(name)),
                Some(witness) => report.push(CheckResult::fail(name, witness)),
            },
            Err(e) => report.push(CheckResult::fail(name, json!({"error": e.to_string()}))),
        }
    }
    report
}

/// The curve element A(t) = y-word(t,...,t) chi-word(1,...,1) x-word(t,...,t)
/// applied to the flag's basis. For t > 0 this is a totally positive matrix,
/// so it carries nonnegative flags to strictly positive ones.
pub fn boundary_curve_sample(
    g: GroupDescriptor,
    f: &Flag,
    t: &QuadScalar,
) -> Result<Flag, PositivityError> {
    let letters = w0_letters(g)?;
    let torus: Vec<usize> = (1..=g.rank()).collect();
    let mut all_letters = letters.clone();
    all_letters.extend(&torus);
    all_letters.extend(&letters);
    let mut kinds = vec![FactorKind::Y; letters.len()];
    kinds.extend(vec![FactorKind::Chi; torus.len()]);
    kinds.extend(vec![FactorKind::X; letters.len()]);
    let mut params = vec![t.clone(); letters.len()];
    params.extend(vec![QuadScalar::one(); torus.len()]);
    params.extend(vec![t.clone(); letters.len()]);
    let a_t = word_product(g, &all_letters, &kinds, &params).expect("valid word");
    Flag::from_matrix(a_t.mul(&f.basis), f.ranks.clone())
        .map_err(|e| PositivityError::FlagConstruction(e.to_string()))
}

/// Per-rank comparison scalars between the Plücker vector of the leading
/// (N-i)-column span and the dual-indexed Plücker vector of the leading
/// i-column span: the scalar c_i with
/// plucker(L_{N-i})[dual(S)] = c_i * plucker(L_i)[S] for all S.
pub fn duality_ratios(
    m: &ExactMatrix,
    g: GroupDescriptor,
) -> Result<Vec<(usize, QuadScalar)>, PositivityError> {
    if !pinning::group_membership(m, g) {
        return Err(PositivityError::Membership);
    }
    let ambient = g.ambient();
    let n = g.rank();
    let mut out = Vec::new();
    for i in 1..=n {
        let p = plucker_vector(&m.leading_columns(i)).expect("dimensions");
        let q = plucker_vector(&m.leading_columns(ambient - i)).expect("dimensions");
        let mapped = PluckerVector {
            n: ambient,
            k: ambient - i,
            coords: p
                .coords
                .iter()
                .map(|(s, v)| (dual_index_map(s, ambient), v.clone()))
                .collect(),
        };
        match projective_ratio(&mapped, &q) {
            Some(c) => out.push((i, c)),
            None => return Err(PositivityError::FlagConstruction(
                "complementary Plücker vectors are not proportional".into(),
            )),
        }
    }
    Ok(out)
}

/// A generic-looking group element for duality sampling: a y-word along w0,
/// a torus part, an x-word along w0, and (on odd samples) a leading sdot
/// factor to leave the big cell.
fn duality_sample_element(
    g: GroupDescriptor,
    rng: &mut rand_chacha::ChaCha8Rng,
    with_sdot: bool,
) -> ExactMatrix {
    let letters = w0_letters(g).expect("sampleable system");
    let y = y_word_product(g, &letters, &sampling::positive_params(rng, letters.len())).unwrap();
    let torus: Vec<usize> = (1..=g.rank()).collect();
    let chi = word_product(
        g,
        &torus,
        &vec![FactorKind::Chi; torus.len()],
        &sampling::positive_params(rng, torus.len()),
    )
    .unwrap();
    let x = word_product(
        g,
        &letters,
        &vec![FactorKind::X; letters.len()],
        &sampling::positive_params(rng, letters.len()),
    )
    .unwrap();
    let base = y.mul(&chi).mul(&x);
    if with_sdot {
        pinning::sdot(g, 1).unwrap().mul(&base)
    } else {
        base
    }
}

/// Duality suite: for sampled group elements, the mirror leading subspaces
/// are the perps of their partners, and the complementary Plücker ratios
/// carry one common sign across all ranks of each matrix.
pub fn duality_report(g: GroupDescriptor, samples: usize, seed: u64) -> Report {
    let mut report = Report::new("duality", g.describe(), seed, samples as u64);
    let mut rng = sampling::rng(seed);
    let ambient = g.ambient();
    let form = g.form().expect("duality needs a bilinear form");
    for idx in 0..samples {
        let m = duality_sample_element(g, &mut rng, idx % 2 == 1);
        let perp_ok = (1..=g.rank()).all(|i| {
            let perp = form.perp(&m.leading_columns(i)).expect("dimensions");
            same_span(&m.leading_columns(ambient - i), &perp)
        });
        report.push(CheckResult::from_bool(
            format!("sample.{idx}.mirror-is-perp"),
            perp_ok,
            json!({"sample": idx}),
        ));
        match duality_ratios(&m, g) {
            Ok(ratios) => {
                let signs: Vec<i8> = ratios.iter().map(|(_, c)| c.sign()).collect();
                let constant = signs.windows(2).all(|w| w[0] == w[1]);
                report.push(CheckResult::from_bool(
                    format!("sample.{idx}.single-global-sign"),
                    constant && !signs.is_empty(),
                    json!({
                        "ratios": ratios
                            .iter()
                            .map(|(i, c)| json!({"rank": i, "ratio": c.to_string()}))
                            .collect::<Vec<_>>(),
                    }),
                ));
            }
            Err(e) => report.push(CheckResult::fail(
                format!("sample.{idx}.single-global-sign"),
                json!({"error": e.to_string()}),
            )),
        }
    }
    report
}
