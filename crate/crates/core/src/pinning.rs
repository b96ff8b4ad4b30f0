//! Pinned generator matrices x_i(m), y_i(m), chi_i(t), sdot_i for the
//! classical groups in their defining representations, plus the exact
//! compatibility identities that relate each composite pinning to the
//! ambient type-A one.
//!
//! Index conventions (1-based, ambient size N):
//! - A(N): the elementary block of phi_i sits at rows/columns (i, i+1).
//! - C(n), N = 2n: for i < n, phi_i places the block at (i, i+1) and again
//!   at (2n-i, 2n-i+1); for i = n a single block at (n, n+1).
//! - B(n), N = 2n+1: for i < n, blocks at (i, i+1) and (2n+1-i, 2n+2-i);
//!   for i = n the symmetric-square 3x3 block on rows n..n+2, so x_n(m)
//!   carries entries sqrt(2)m and m^2.
//! - D(n), N = 2n: for i < n as in C; for i = n the block interleaves over
//!   rows/columns (n-1, n, n+1, n+2): phi_n([[a,b],[c,d]]) has a at
//!   (n-1,n-1) and (n,n), b at (n-1,n+1) and (n,n+2), c at (n+1,n-1) and
//!   (n+2,n), d at (n+1,n+1) and (n+2,n+2).

use crate::linalg::{BilinearForm, ExactMatrix};
use crate::scalar::QuadScalar;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PinningError {
    #[error("index {0} is out of range for this system")]
    BadIndex(usize),
    #[error("chi requires a nonzero parameter")]
    ZeroChiParam,
    #[error("letters, kinds, and params must have equal lengths")]
    LengthMismatch,
    #[error("matrix does not belong to the group")]
    NotInGroup,
}

/// Which classical group, at which rank. The ambient matrix size and the
/// invariant bilinear form follow from the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    A { ambient: usize },
    C { n: usize },
    B { n: usize },
    D { n: usize },
}

impl GroupDescriptor {
    pub fn ambient(self) -> usize {
        match self {
            GroupDescriptor::A { ambient } => ambient,
            GroupDescriptor::C { n } | GroupDescriptor::D { n } => 2 * n,
            GroupDescriptor::B { n } => 2 * n + 1,
        }
    }

    /// Number of simple-root indices.
    pub fn rank(self) -> usize {
        match self {
            GroupDescriptor::A { ambient } => ambient - 1,
            GroupDescriptor::C { n } | GroupDescriptor::B { n } | GroupDescriptor::D { n } => n,
        }
    }

    pub fn form(self) -> Option<BilinearForm> {
        match self {
            GroupDescriptor::A { .. } => None,
            GroupDescriptor::C { n } => Some(BilinearForm::type_c(n)),
            GroupDescriptor::B { n } => Some(BilinearForm::type_b(n)),
            GroupDescriptor::D { n } => Some(BilinearForm::type_d(n)),
        }
    }

    pub fn weyl_system(self) -> Option<crate::weyl::System> {
        match self {
            GroupDescriptor::A { ambient } => Some(crate::weyl::System::A(ambient - 1)),
            GroupDescriptor::C { n } => Some(crate::weyl::System::C(n)),
            GroupDescriptor::B { n } => Some(crate::weyl::System::B(n)),
            GroupDescriptor::D { .. } => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            GroupDescriptor::A { ambient } => format!("A(N={ambient})"),
            GroupDescriptor::C { n } => format!("C({n})"),
            GroupDescriptor::B { n } => format!("B({n})"),
            GroupDescriptor::D { n } => format!("D({n})"),
        }
    }

    pub fn describe(self) -> Value {
        match self {
            GroupDescriptor::A { ambient } => json!({"system": "A", "ambient": ambient}),
            GroupDescriptor::C { n } => json!({"system": "C", "n": n, "ambient": 2 * n}),
            GroupDescriptor::B { n } => json!({"system": "B", "n": n, "ambient": 2 * n + 1}),
            GroupDescriptor::D { n } => json!({"system": "D", "n": n, "ambient": 2 * n}),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    X,
    Y,
    Chi,
    Sdot,
}

/// Writes the 2x2 matrix [[a,b],[c,d]] into the identity at the designated
/// positions of phi_i. `out` starts as the identity.
fn write_sl2_block(out: &mut ExactMatrix, top: usize, entries: &[[QuadScalar; 2]; 2]) {
    for r in 0..2 {
        for c in 0..2 {
            out.set(top - 1 + r, top - 1 + c, entries[r][c].clone());
        }
    }
}

fn sl2(a: QuadScalar, b: QuadScalar, c: QuadScalar, d: QuadScalar) -> [[QuadScalar; 2]; 2] {
    [[a, b], [c, d]]
}

/// The embedding phi_i applied to [[a,b],[c,d]], written entry by entry.
fn phi(g: GroupDescriptor, i: usize, m2: &[[QuadScalar; 2]; 2]) -> Result<ExactMatrix, PinningError> {
    let rank = g.rank();
    if i < 1 || i > rank {
        return Err(PinningError::BadIndex(i));
    }
    let mut out = ExactMatrix::identity(g.ambient());
    let [[a, b], [c, d]] = m2;
    match g {
        GroupDescriptor::A { .. } => write_sl2_block(&mut out, i, m2),
        GroupDescriptor::C { n } | GroupDescriptor::D { n } if i < n => {
            write_sl2_block(&mut out, i, m2);
            write_sl2_block(&mut out, 2 * n - i, m2);
        }
        GroupDescriptor::C { n } => write_sl2_block(&mut out, n, m2),
        GroupDescriptor::B { n } if i < n => {
            write_sl2_block(&mut out, i, m2);
            write_sl2_block(&mut out, 2 * n + 1 - i, m2);
        }
        GroupDescriptor::B { n } => {
            // Symmetric square of the 2x2 block, in the basis that puts
            // sqrt(2) on the cross terms; this is exactly the displayed
            // 3x3 matrix with entries sqrt(2)m and m^2.
            let r2 = QuadScalar::sqrt2();
            let block = [
                [a * a, &r2 * &(a * b), b * b],
                [&r2 * &(a * c), &(a * d) + &(b * c), &r2 * &(b * d)],
                [c * c, &r2 * &(c * d), d * d],
            ];
            for r in 0..2 + 1 {
                for col in 0..2 + 1 {
                    out.set(n - 1 + r, n - 1 + col, block[r][col].clone());
                }
            }
        }
        GroupDescriptor::D { n } => {
            if n < 2 {
                return Err(PinningError::BadIndex(i));
            }
            // Interleaved block on rows/columns (n-1, n, n+1, n+2).
            let (p1, p2, q1, q2) = (n - 2, n - 1, n, n + 1); // 0-based
            for (r0, c0, v) in [
                (p1, p1, a),
                (p2, p2, a),
                (p1, q1, b),
                (p2, q2, b),
                (q1, p1, c),
                (q2, p2, c),
                (q1, q1, d),
                (q2, q2, d),
            ] {
                out.set(r0, c0, v.clone());
            }
        }
    }
    Ok(out)
}

pub fn generator(
    g: GroupDescriptor,
    kind: GeneratorKind,
    i: usize,
    param: Option<&QuadScalar>,
) -> Result<ExactMatrix, PinningError> {
    let one = QuadScalar::one;
    let zero = QuadScalar::zero;
    let block = match kind {
        GeneratorKind::X => {
            let m = param.cloned().unwrap_or_else(one);
            sl2(one(), m, zero(), one())
        }
        GeneratorKind::Y => {
            let m = param.cloned().unwrap_or_else(one);
            sl2(one(), zero(), m, one())
        }
        GeneratorKind::Chi => {
            let t = param.cloned().ok_or(PinningError::ZeroChiParam)?;
            let t_inv = t.inverse().map_err(|_| PinningError::ZeroChiParam)?;
            sl2(t, zero(), zero(), t_inv)
        }
        GeneratorKind::Sdot => sl2(zero(), -&one(), one(), zero()),
    };
    phi(g, i, &block)
}

pub fn x(g: GroupDescriptor, i: usize, m: &QuadScalar) -> Result<ExactMatrix, PinningError> {
    generator(g, GeneratorKind::X, i, Some(m))
}

pub fn y(g: GroupDescriptor, i: usize, m: &QuadScalar) -> Result<ExactMatrix, PinningError> {
    generator(g, GeneratorKind::Y, i, Some(m))
}

pub fn chi(g: GroupDescriptor, i: usize, t: &QuadScalar) -> Result<ExactMatrix, PinningError> {
    generator(g, GeneratorKind::Chi, i, Some(t))
}

pub fn sdot(g: GroupDescriptor, i: usize) -> Result<ExactMatrix, PinningError> {
    generator(g, GeneratorKind::Sdot, i, None)
}

/// Inverse of sdot_i, built directly as phi_i([[0,1],[-1,0]]).
pub fn sdot_inv(g: GroupDescriptor, i: usize) -> Result<ExactMatrix, PinningError> {
    let one = QuadScalar::one();
    phi(g, i, &sl2(QuadScalar::zero(), one.clone(), -&one, QuadScalar::zero()))
}

/// Membership test: invertibility for type A; M^t E M = E and det M = 1 for
/// the form-preserving groups.
pub fn group_membership(m: &ExactMatrix, g: GroupDescriptor) -> bool {
    if m.rows() != g.ambient() || m.cols() != g.ambient() {
        return false;
    }
    match g.form() {
        None => !m.det().is_zero(),
        Some(form) => {
            m.transpose().mul(&form.gram).mul(m) == form.gram
                && m.det() == QuadScalar::one()
        }
    }
}

fn a_side(g: GroupDescriptor) -> GroupDescriptor {
    GroupDescriptor::A { ambient: g.ambient() }
}

/// Mirror letter(s) of i on the type-A side of the folding, with i itself
/// first. Single-entry for the middle letter of C.
fn psi_letters(g: GroupDescriptor, i: usize) -> Vec<usize> {
    match g {
        GroupDescriptor::C { n } => {
            if i < n {
                vec![i, 2 * n - i]
            } else {
                vec![n]
            }
        }
        GroupDescriptor::B { n } => {
            if i < n {
                vec![i, 2 * n + 1 - i]
            } else {
                vec![n, n + 1, n]
            }
        }
        _ => panic!("folding letters exist for types B and C only"),
    }
}

/// Evaluation points for certifying polynomial identities in one parameter.
/// Matrix entries have degree at most 4 in the parameter across all the
/// identities below, so 5 distinct points pin the polynomials down.
fn eval_points() -> Vec<QuadScalar> {
    vec![
        QuadScalar::from_int(1),
        QuadScalar::from_int(2),
        QuadScalar::from_int(3),
        QuadScalar::from_ratio(1, 2),
        QuadScalar::from_int(-3),
    ]
}

fn chi_points() -> Vec<QuadScalar> {
    vec![
        QuadScalar::from_int(1),
        QuadScalar::from_int(2),
        QuadScalar::from_int(3),
        QuadScalar::from_ratio(1, 2),
        QuadScalar::from_int(5),
    ]
}

/// The compatibility identities between a C(n)/B(n) generator and products
/// of ambient type-A generators:
/// - i < n: G_i = G_i^A G_mirror^A for G in {x, y, chi, sdot};
/// - i = n, type C: G_n equals the ambient A generator at n outright;
/// - i = n, type B: y_n(m) = y_n^A(m/sqrt2) y_{n+1}^A(sqrt2 m) y_n^A(m/sqrt2),
///   same shape for x, chi_n(t) = chi_n^A(t^2) chi_{n+1}^A(t^2), and
///   sdot_n = sdot_n^A sdot_{n+1}^A sdot_n^A.
pub fn verify_compatibility(g: GroupDescriptor, i: usize) -> bool {
    let (is_b, n) = match g {
        GroupDescriptor::C { n } => (false, n),
        GroupDescriptor::B { n } => (true, n),
        _ => return false,
    };
    if i < 1 || i > n {
        return false;
    }
    let a = a_side(g);
    let letters = psi_letters(g, i);

    let xy_ok = eval_points().iter().all(|m| {
        [GeneratorKind::X, GeneratorKind::Y].iter().all(|&kind| {
            let lhs = generator(g, kind, i, Some(m)).unwrap();
            let rhs = if is_b && i == n {
                let r2 = QuadScalar::sqrt2();
                let half = m.checked_div(&r2).unwrap();
                let big = &r2 * m;
                let f = |p: &QuadScalar, at: usize| generator(a, kind, at, Some(p)).unwrap();
                f(&half, n).mul(&f(&big, n + 1)).mul(&f(&half, n))
            } else {
                letters
                    .iter()
                    .map(|&l| generator(a, kind, l, Some(m)).unwrap())
                    .reduce(|p, q| p.mul(&q))
                    .unwrap()
            };
            lhs == rhs
        })
    });

    let chi_ok = chi_points().iter().all(|t| {
        let lhs = chi(g, i, t).unwrap();
        let rhs = if is_b && i == n {
            let t2 = t * t;
            chi(a, n, &t2).unwrap().mul(&chi(a, n + 1, &t2).unwrap())
        } else {
            letters
                .iter()
                .map(|&l| chi(a, l, t).unwrap())
                .reduce(|p, q| p.mul(&q))
                .unwrap()
        };
        lhs == rhs
    });

    let sdot_ok = {
        let lhs = sdot(g, i).unwrap();
        let rhs = if is_b && i == n {
            sdot(a, n)
                .unwrap()
                .mul(&sdot(a, n + 1).unwrap())
                .mul(&sdot(a, n).unwrap())
        } else {
            letters
                .iter()
                .map(|&l| sdot(a, l).unwrap())
                .reduce(|p, q| p.mul(&q))
                .unwrap()
        };
        lhs == rhs
    };

    xy_ok && chi_ok && sdot_ok
}

/// The factorization of x_i(m) sdot_i^{-1} through the type-A side:
/// - i < n: x_i(m) sdot_i^{-1} = [x_i^A(m) (sdot_i^A)^{-1}]
///   [x_mirror^A(m) (sdot_mirror^A)^{-1}], and the two ambient factors
///   commute (disjoint blocks);
/// - i = n, type C: the two sides are the same matrix;
/// - i = n, type B: x_n(m) sdot_n^{-1} = x_n^A(sqrt2 m) (sdot_n^A)^{-1}
///   x_{n+1}^A(-m^2) (sdot_{n+1}^A)^{-1} x_n^A(sqrt2 m) (sdot_n^A)^{-1}.
pub fn verify_xs_inverse_compatibility(g: GroupDescriptor, i: usize) -> bool {
    let (is_b, n) = match g {
        GroupDescriptor::C { n } => (false, n),
        GroupDescriptor::B { n } => (true, n),
        _ => return false,
    };
    if i < 1 || i > n {
        return false;
    }
    let a = a_side(g);
    let xs = |desc: GroupDescriptor, at: usize, m: &QuadScalar| {
        x(desc, at, m).unwrap().mul(&sdot_inv(desc, at).unwrap())
    };

    eval_points().iter().all(|m| {
        let lhs = xs(g, i, m);
        if is_b && i == n {
            let big = &QuadScalar::sqrt2() * m;
            let neg_sq = -&(m * m);
            let rhs = xs(a, n, &big).mul(&xs(a, n + 1, &neg_sq)).mul(&xs(a, n, &big));
            lhs == rhs
        } else {
            let letters = psi_letters(g, i);
            let factors: Vec<ExactMatrix> = letters.iter().map(|&l| xs(a, l, m)).collect();
            let rhs = factors.iter().cloned().reduce(|p, q| p.mul(&q)).unwrap();
            let commute = factors.len() < 2 || factors[0].mul(&factors[1]) == factors[1].mul(&factors[0]);
            lhs == rhs && commute
        }
    })
}

/// Factor shapes accepted by [`word_product`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    X,
    Y,
    Chi,
    Sdot,
    /// x_i(m) sdot_i^{-1}, the shape of a Deodhar J^- factor.
    XSdotInv,
}

/// Left-to-right product of generator factors along a letter sequence.
/// Params are ignored for Sdot positions.
pub fn word_product(
    g: GroupDescriptor,
    letters: &[usize],
    kinds: &[FactorKind],
    params: &[QuadScalar],
) -> Result<ExactMatrix, PinningError> {
    if letters.len() != kinds.len() || letters.len() != params.len() {
        return Err(PinningError::LengthMismatch);
    }
    let mut acc = ExactMatrix::identity(g.ambient());
    for ((&i, &kind), m) in letters.iter().zip(kinds).zip(params) {
        let factor = match kind {
            FactorKind::X => x(g, i, m)?,
            FactorKind::Y => y(g, i, m)?,
            FactorKind::Chi => chi(g, i, m)?,
            FactorKind::Sdot => sdot(g, i)?,
            FactorKind::XSdotInv => x(g, i, m)?.mul(&sdot_inv(g, i)?),
        };
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

/// Product of y-generators along a word with the given parameters.
pub fn y_word_product(
    g: GroupDescriptor,
    letters: &[usize],
    params: &[QuadScalar],
) -> Result<ExactMatrix, PinningError> {
    word_product(g, letters, &vec![FactorKind::Y; letters.len()], params)
}

/// One coordinate map of a folding identity: how a composite-side parameter
/// transforms on a designated ambient letter.
#[derive(Clone, Debug, PartialEq)]
pub enum CoordMap {
    Identity,
    Scale(QuadScalar),
    SquareNegate,
}

impl CoordMap {
    pub fn apply(&self, m: &QuadScalar) -> QuadScalar {
        match self {
            CoordMap::Identity => m.clone(),
            CoordMap::Scale(c) => c * m,
            CoordMap::SquareNegate => -&(m * m),
        }
    }
}

/// Which factor shape a folding identity describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorClass {
    Y,
    XSdotInv,
}

/// The ambient letters and per-letter parameter maps expressing one
/// composite factor as a product of type-A factors of the same shape.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldIdentity {
    pub target_letters: Vec<usize>,
    pub maps: Vec<CoordMap>,
}

impl FoldIdentity {
    pub fn apply(&self, m: &QuadScalar) -> Vec<QuadScalar> {
        self.maps.iter().map(|f| f.apply(m)).collect()
    }
}

pub fn fold_identity(g: GroupDescriptor, i: usize, class: FactorClass) -> FoldIdentity {
    let (is_b, n) = match g {
        GroupDescriptor::C { n } => (false, n),
        GroupDescriptor::B { n } => (true, n),
        _ => panic!("folding identities exist for types B and C only"),
    };
    let target_letters = psi_letters(g, i);
    let maps = if i < n || !is_b {
        vec![CoordMap::Identity; target_letters.len()]
    } else {
        let r2 = QuadScalar::sqrt2();
        match class {
            FactorClass::Y => {
                let half = QuadScalar::one().checked_div(&r2).unwrap();
                vec![CoordMap::Scale(half.clone()), CoordMap::Scale(r2), CoordMap::Scale(half)]
            }
            FactorClass::XSdotInv => vec![
                CoordMap::Scale(r2.clone()),
                CoordMap::SquareNegate,
                CoordMap::Scale(r2),
            ],
        }
    };
    FoldIdentity { target_letters, maps }
}

/// Full generator-level verification suite for one descriptor: membership of
/// every generator, the one-parameter group laws, the block form of sdot,
/// upper-triangularity of the positive Borel, and (for B/C) the folding
/// compatibility identities.
pub fn verify_pinning_report(g: GroupDescriptor, seed: u64) -> crate::report::Report {
    use crate::report::{CheckResult, Report};
    let mut rng = crate::sampling::rng(seed);
    let mut report = Report::new("verify-pinning", g.describe(), seed, 1);

    for i in 1..=g.rank() {
        let m = crate::sampling::positive_rational(&mut rng);
        let t = crate::sampling::positive_rational(&mut rng);
        for (kind, label) in [
            (GeneratorKind::X, "x"),
            (GeneratorKind::Y, "y"),
            (GeneratorKind::Chi, "chi"),
            (GeneratorKind::Sdot, "sdot"),
        ] {
            let param = if kind == GeneratorKind::Chi { &t } else { &m };
            let mat = generator(g, kind, i, Some(param)).unwrap();
            report.push(CheckResult::from_bool(
                format!("membership.{label}.{i}"),
                group_membership(&mat, g),
                json!({"index": i, "kind": label}),
            ));
        }

        let a = crate::sampling::positive_rational(&mut rng);
        let b = crate::sampling::positive_rational(&mut rng);
        let add_law = y(g, i, &a).unwrap().mul(&y(g, i, &b).unwrap()) == y(g, i, &(&a + &b)).unwrap()
            && x(g, i, &a).unwrap().mul(&x(g, i, &b).unwrap()) == x(g, i, &(&a + &b)).unwrap();
        report.push(CheckResult::from_bool(
            format!("one-parameter-law.additive.{i}"),
            add_law,
            json!({"index": i}),
        ));
        let mul_law =
            chi(g, i, &a).unwrap().mul(&chi(g, i, &b).unwrap()) == chi(g, i, &(&a * &b)).unwrap();
        report.push(CheckResult::from_bool(
            format!("one-parameter-law.torus.{i}"),
            mul_law,
            json!({"index": i}),
        ));

        // sdot_i = x_i(-1) y_i(1) x_i(-1): the SL2 relation transported
        // through phi_i, so it holds exactly when the displays are the
        // images of one homomorphism.
        let neg_one = QuadScalar::from_int(-1);
        let one = QuadScalar::one();
        let via_xy = x(g, i, &neg_one)
            .unwrap()
            .mul(&y(g, i, &one).unwrap())
            .mul(&x(g, i, &neg_one).unwrap());
        report.push(CheckResult::from_bool(
            format!("sdot-block-form.{i}"),
            via_xy == sdot(g, i).unwrap(),
            json!({"index": i}),
        ));

        if matches!(g, GroupDescriptor::C { .. } | GroupDescriptor::B { .. }) {
            report.push(CheckResult::from_bool(
                format!("compatibility.{i}"),
                verify_compatibility(g, i),
                json!({"index": i}),
            ));
            report.push(CheckResult::from_bool(
                format!("xs-inverse-compatibility.{i}"),
                verify_xs_inverse_compatibility(g, i),
                json!({"index": i}),
            ));
        }
    }

    // Products of x and chi generators stay upper triangular.
    let letters: Vec<usize> = (1..=g.rank()).chain(1..=g.rank()).collect();
    let mut kinds = vec![FactorKind::X; g.rank()];
    kinds.extend(vec![FactorKind::Chi; g.rank()]);
    let params = crate::sampling::positive_params(&mut rng, letters.len());
    let upper = word_product(g, &letters, &kinds, &params).unwrap();
    report.push(CheckResult::from_bool(
        "positive-borel-upper-triangular",
        upper.is_upper_triangular(),
        json!({"letters": letters}),
    ));

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn q(v: i64) -> QuadScalar {
        QuadScalar::from_int(v)
    }

    #[test]
    fn generator_displays() {
        // A(4), y_2(m): identity plus m at row 3, column 2.
        let m = QuadScalar::from_ratio(5, 3);
        let g = GroupDescriptor::A { ambient: 4 };
        let mat = y(g, 2, &m).unwrap();
        let mut expect = ExactMatrix::identity(4);
        expect.set(2, 1, m.clone());
        assert_eq!(mat, expect);

        // B(2), x_2(m): rows 2..4 carry (1, sqrt2 m, m^2 / 0, 1, sqrt2 m / 0, 0, 1).
        let b2 = GroupDescriptor::B { n: 2 };
        let mat = x(b2, 2, &m).unwrap();
        let r2m = &QuadScalar::sqrt2() * &m;
        let mut expect = ExactMatrix::identity(5);
        expect.set(1, 2, r2m.clone());
        expect.set(1, 3, &m * &m);
        expect.set(2, 3, r2m);
        assert_eq!(mat, expect);

        // C(2), sdot_1 equals the product of ambient sdot_1 and sdot_3.
        let c2 = GroupDescriptor::C { n: 2 };
        let a4 = GroupDescriptor::A { ambient: 4 };
        assert_eq!(
            sdot(c2, 1).unwrap(),
            sdot(a4, 1).unwrap().mul(&sdot(a4, 3).unwrap())
        );

        // D(4), y_4(m): the interleaved block puts m at (5,3) and (6,4).
        let d4 = GroupDescriptor::D { n: 4 };
        let mat = y(d4, 4, &m).unwrap();
        let mut expect = ExactMatrix::identity(8);
        expect.set(4, 2, m.clone());
        expect.set(5, 3, m.clone());
        assert_eq!(mat, expect);

        assert_eq!(chi(c2, 1, &QuadScalar::zero()), Err(PinningError::ZeroChiParam));
        assert_eq!(x(c2, 3, &m), Err(PinningError::BadIndex(3)));
    }

    #[test]
    fn membership_of_all_generators() {
        let mut rng = sampling::rng(11);
        for g in [
            GroupDescriptor::A { ambient: 5 },
            GroupDescriptor::C { n: 2 },
            GroupDescriptor::C { n: 3 },
            GroupDescriptor::C { n: 4 },
            GroupDescriptor::B { n: 2 },
            GroupDescriptor::B { n: 3 },
            GroupDescriptor::B { n: 4 },
            GroupDescriptor::D { n: 4 },
        ] {
            assert!(group_membership(&ExactMatrix::identity(g.ambient()), g));
            for i in 1..=g.rank() {
                let m = sampling::signed_rational(&mut rng);
                for kind in [
                    GeneratorKind::X,
                    GeneratorKind::Y,
                    GeneratorKind::Chi,
                    GeneratorKind::Sdot,
                ] {
                    let mat = generator(g, kind, i, Some(&m)).unwrap();
                    assert!(group_membership(&mat, g), "{} {kind:?} {i}", g.name());
                }
            }
        }

        let bad = ExactMatrix::from_i64_rows(&[&[2, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert!(!group_membership(&bad, GroupDescriptor::C { n: 2 }));
        assert!(group_membership(&bad, GroupDescriptor::A { ambient: 4 }));
        let singular = ExactMatrix::zero(4, 4);
        assert!(!group_membership(&singular, GroupDescriptor::A { ambient: 4 }));
    }

    #[test]
    fn compatibility_identities_hold_up_to_rank_four() {
        for n in 2..=4 {
            for g in [GroupDescriptor::C { n }, GroupDescriptor::B { n }] {
                for i in 1..=n {
                    assert!(verify_compatibility(g, i), "{} i={i}", g.name());
                    assert!(verify_xs_inverse_compatibility(g, i), "{} i={i}", g.name());
                }
            }
        }
    }

    #[test]
    fn y_word_product_hand_example() {
        // A(2) y-word (1,2,1) with params (a,b,c): lower triangular with
        // (2,1) = a+c, (3,2) = b, (3,1) = bc.
        let g = GroupDescriptor::A { ambient: 3 };
        let (a, b, c) = (q(2), q(5), q(7));
        let prod = y_word_product(g, &[1, 2, 1], &[a.clone(), b.clone(), c.clone()]).unwrap();
        let mut expect = ExactMatrix::identity(3);
        expect.set(1, 0, &a + &c);
        expect.set(2, 1, b.clone());
        expect.set(2, 0, &b * &c);
        assert_eq!(prod, expect);

        let empty = word_product(g, &[], &[], &[]).unwrap();
        assert_eq!(empty, ExactMatrix::identity(3));

        assert_eq!(
            word_product(g, &[1], &[], &[]),
            Err(PinningError::LengthMismatch)
        );
    }

    #[test]
    fn fold_identities_expand_factors_exactly() {
        // The FoldIdentity data must reproduce the matrix identities factor
        // by factor, for every letter and both factor shapes.
        let points = vec![q(1), q(2), QuadScalar::from_ratio(3, 7)];
        for n in 2..=4 {
            for g in [GroupDescriptor::C { n }, GroupDescriptor::B { n }] {
                let a = a_side(g);
                for i in 1..=n {
                    for class in [FactorClass::Y, FactorClass::XSdotInv] {
                        let fold = fold_identity(g, i, class);
                        for m in &points {
                            let lhs = match class {
                                FactorClass::Y => y(g, i, m).unwrap(),
                                FactorClass::XSdotInv => {
                                    x(g, i, m).unwrap().mul(&sdot_inv(g, i).unwrap())
                                }
                            };
                            let rhs = fold
                                .target_letters
                                .iter()
                                .zip(fold.apply(m))
                                .map(|(&l, p)| match class {
                                    FactorClass::Y => y(a, l, &p).unwrap(),
                                    FactorClass::XSdotInv => {
                                        x(a, l, &p).unwrap().mul(&sdot_inv(a, l).unwrap())
                                    }
                                })
                                .reduce(|u, v| u.mul(&v))
                                .unwrap();
                            assert_eq!(lhs, rhs, "{} i={i} {class:?} m={m}", g.name());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn y_fold_maps_preserve_positivity() {
        for g in [GroupDescriptor::C { n: 3 }, GroupDescriptor::B { n: 3 }] {
            for i in 1..=3 {
                let fold = fold_identity(g, i, FactorClass::Y);
                let m = QuadScalar::from_ratio(4, 9);
                assert!(fold.apply(&m).iter().all(|p| p.is_positive()));
                assert!(fold.apply(&QuadScalar::zero()).iter().all(|p| p.is_zero()));
            }
        }
    }

    #[test]
    fn pinning_reports_pass_for_all_systems() {
        for g in [
            GroupDescriptor::A { ambient: 4 },
            GroupDescriptor::C { n: 3 },
            GroupDescriptor::B { n: 3 },
            GroupDescriptor::D { n: 4 },
        ] {
            let report = verify_pinning_report(g, 42);
            assert!(report.passed(), "{}:\n{}", g.name(), report.to_text());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = verify_pinning_report(GroupDescriptor::C { n: 2 }, 42).to_json_string();
        let b = verify_pinning_report(GroupDescriptor::C { n: 2 }, 42).to_json_string();
        assert_eq!(a, b);
    }
}
