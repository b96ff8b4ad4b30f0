//! Weyl groups of types A, B, C as (signed) permutations: words, lengths,
//! Bruhat order, reduced-word enumeration, distinguished subexpressions,
//! minimal coset representatives, and the letter-folding maps into type A.
//!
//! Convention: products compose left to right, so the one-line notation of
//! `word_to_element((1,2,3,1,2))` in A(3) is 4312. Types B and C share one
//! abstract group (signed permutations of [n]); they differ only in the
//! ambient realization and in the folding maps.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("letter {0} is not a valid simple-root index here")]
    BadLetter(usize),
    #[error("element does not lie below the word in Bruhat order")]
    NotBruhatBelow,
    #[error("enumeration exceeded the cap of {0}")]
    CapExceeded(usize),
    #[error("mixed kinds or sizes")]
    KindMismatch,
    #[error("expected a type-B or type-C word")]
    NotFoldable,
}

/// Root-system label for words. `A(r)` has simple indices 1..=r and acts on
/// r+1 ambient points; `B(n)`/`C(n)` have indices 1..=n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    A(usize),
    B(usize),
    C(usize),
}

impl System {
    pub fn rank(self) -> usize {
        match self {
            System::A(r) => r,
            System::B(n) | System::C(n) => n,
        }
    }

    /// Matrix size of the pinned realization.
    pub fn ambient(self) -> usize {
        match self {
            System::A(r) => r + 1,
            System::B(n) => 2 * n + 1,
            System::C(n) => 2 * n,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::A(r) => write!(f, "A({r})"),
            System::B(n) => write!(f, "B({n})"),
            System::C(n) => write!(f, "C({n})"),
        }
    }
}

/// A sequence of simple-root indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub system: System,
    pub letters: Vec<usize>,
}

impl Word {
    pub fn new(system: System, letters: Vec<usize>) -> Result<Self, WeylError> {
        if let Some(&bad) = letters.iter().find(|&&i| i < 1 || i > system.rank()) {
            return Err(WeylError::BadLetter(bad));
        }
        Ok(Word { system, letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// A permutation of [n] (TypeA, one-line values 1..=n on n points) or a
/// signed permutation of [n] (one-line values with sign; w(-i) = -w(i) is
/// implicit, so bar equivariance holds by construction).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WeylElement {
    TypeA(Vec<usize>),
    Signed(Vec<i64>),
}

use WeylElement::{Signed, TypeA};

impl WeylElement {
    pub fn identity_for(system: System) -> Self {
        match system {
            System::A(r) => TypeA((1..=r + 1).collect()),
            System::B(n) | System::C(n) => Signed((1..=n as i64).collect()),
        }
    }

    pub fn simple_for(system: System, i: usize) -> Self {
        assert!((1..=system.rank()).contains(&i), "bad simple index");
        match system {
            System::A(r) => {
                let mut ol: Vec<usize> = (1..=r + 1).collect();
                ol.swap(i - 1, i);
                TypeA(ol)
            }
            System::B(n) | System::C(n) => {
                let mut ol: Vec<i64> = (1..=n as i64).collect();
                if i < n {
                    ol.swap(i - 1, i);
                } else {
                    ol[n - 1] = -(n as i64);
                }
                Signed(ol)
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            TypeA(ol) => ol.iter().enumerate().all(|(i, &v)| v == i + 1),
            Signed(ol) => ol.iter().enumerate().all(|(i, &v)| v == i as i64 + 1),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            TypeA(ol) => ol.len(),
            Signed(ol) => ol.len(),
        }
    }

    /// Product composing left to right: (u v)(x) = v(u(x)).
    pub fn mul(&self, rhs: &WeylElement) -> WeylElement {
        match (self, rhs) {
            (TypeA(u), TypeA(v)) => {
                assert_eq!(u.len(), v.len(), "size mismatch");
                TypeA(u.iter().map(|&y| v[y - 1]).collect())
            }
            (Signed(u), Signed(v)) => {
                assert_eq!(u.len(), v.len(), "size mismatch");
                Signed(
                    u.iter()
                        .map(|&y| {
                            if y > 0 {
                                v[y as usize - 1]
                            } else {
                                -v[(-y) as usize - 1]
                            }
                        })
                        .collect(),
                )
            }
            _ => panic!("kind mismatch"),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        match self {
            TypeA(ol) => {
                let mut inv = vec![0usize; ol.len()];
                for (i, &v) in ol.iter().enumerate() {
                    inv[v - 1] = i + 1;
                }
                TypeA(inv)
            }
            Signed(ol) => {
                let mut inv = vec![0i64; ol.len()];
                for (i, &v) in ol.iter().enumerate() {
                    if v > 0 {
                        inv[v as usize - 1] = i as i64 + 1;
                    } else {
                        inv[(-v) as usize - 1] = -(i as i64 + 1);
                    }
                }
                Signed(inv)
            }
        }
    }

    /// Realization inside S_2n: symbol k sits at position k, symbol k-bar at
    /// position 2n+1-k. Returns the ambient one-line notation.
    pub fn to_ambient_even(&self) -> Vec<usize> {
        let Signed(ol) = self else {
            panic!("ambient realization of a type-A element")
        };
        let n = ol.len();
        let pos = |v: i64| -> usize {
            if v > 0 {
                v as usize
            } else {
                2 * n + 1 - (-v) as usize
            }
        };
        let mut amb = vec![0usize; 2 * n];
        for p in 1..=n {
            let image = pos(ol[p - 1]);
            amb[p - 1] = image;
            amb[2 * n - p] = 2 * n + 1 - image;
        }
        amb
    }

    /// Realization inside S_{2n+1} fixing the center: symbol k at position k,
    /// the center at n+1, symbol k-bar at position 2n+2-k.
    pub fn to_ambient_odd(&self) -> Vec<usize> {
        let Signed(ol) = self else {
            panic!("ambient realization of a type-A element")
        };
        let n = ol.len();
        let pos = |v: i64| -> usize {
            if v > 0 {
                v as usize
            } else {
                2 * n + 2 - (-v) as usize
            }
        };
        let mut amb = vec![0usize; 2 * n + 1];
        amb[n] = n + 1;
        for p in 1..=n {
            let image = pos(ol[p - 1]);
            amb[p - 1] = image;
            amb[2 * n + 1 - p] = 2 * n + 2 - image;
        }
        amb
    }

    /// Coxeter length. For permutations this is the inversion number; for
    /// signed permutations it is the inversion count of the even ambient
    /// realization restricted to pairs (i, j) with i in [n] and i < j <= i-bar,
    /// which deduplicates the bar-symmetric orbit of each inversion.
    pub fn length(&self) -> usize {
        match self {
            TypeA(ol) => {
                let mut count = 0;
                for i in 0..ol.len() {
                    for j in i + 1..ol.len() {
                        if ol[j] < ol[i] {
                            count += 1;
                        }
                    }
                }
                count
            }
            Signed(ol) => {
                let n = ol.len();
                let amb = self.to_ambient_even();
                let mut count = 0;
                for i in 1..=n {
                    for j in i + 1..=(2 * n + 1 - i) {
                        if amb[j - 1] < amb[i - 1] {
                            count += 1;
                        }
                    }
                }
                count
            }
        }
    }

    /// Simple indices i with l(w s_i) < l(w). With left-to-right
    /// composition, w s_i relabels the values i, i+1 of w.
    pub fn right_descents(&self, system: System) -> Vec<usize> {
        (1..=system.rank())
            .filter(|&i| {
                self.mul(&WeylElement::simple_for(system, i)).length() < self.length()
            })
            .collect()
    }

    /// One-line descent set: indices i with l(s_i w) < l(w), i.e. positions
    /// where the one-line notation steps down (and, for signed permutations,
    /// i = n when w(n) is negative).
    pub fn descents(&self, system: System) -> Vec<usize> {
        (1..=system.rank())
            .filter(|&i| {
                WeylElement::simple_for(system, i).mul(self).length() < self.length()
            })
            .collect()
    }

    pub fn one_line_string(&self) -> String {
        match self {
            TypeA(ol) => ol.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            Signed(ol) => ol
                .iter()
                .map(|&v| {
                    if v > 0 {
                        v.to_string()
                    } else {
                        format!("{}b", -v)
                    }
                })
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.one_line_string())
    }
}

/// Multiply out a word left to right.
pub fn word_to_element(w: &Word) -> WeylElement {
    let mut acc = WeylElement::identity_for(w.system);
    for &i in &w.letters {
        acc = acc.mul(&WeylElement::simple_for(w.system, i));
    }
    acc
}

pub fn is_reduced(w: &Word) -> bool {
    word_to_element(w).length() == w.letters.len()
}

/// The longest element: the order-reversing permutation in type A, minus
/// the identity in types B/C.
pub fn longest_element(system: System) -> WeylElement {
    match system {
        System::A(r) => TypeA((1..=r + 1).rev().collect()),
        System::B(n) | System::C(n) => Signed((1..=n as i64).map(|v| -v).collect()),
    }
}

/// One reduced word, produced by repeatedly stripping the smallest right
/// descent.
pub fn some_reduced_word(w: &WeylElement, system: System) -> Word {
    let mut letters_rev = Vec::new();
    let mut cur = w.clone();
    while !cur.is_identity() {
        let i = *cur
            .right_descents(system)
            .first()
            .expect("non-identity element has a descent");
        letters_rev.push(i);
        cur = cur.mul(&WeylElement::simple_for(system, i));
    }
    letters_rev.reverse();
    Word::new(system, letters_rev).expect("valid letters")
}

/// All reduced words, by descent recursion, memoized. Errors if the count
/// would exceed `cap`.
pub fn reduced_words(w: &WeylElement, system: System, cap: usize) -> Result<Vec<Word>, WeylError> {
    fn rec(
        w: &WeylElement,
        system: System,
        cap: usize,
        memo: &mut HashMap<WeylElement, Vec<Vec<usize>>>,
        budget: &mut isize,
    ) -> Result<Vec<Vec<usize>>, WeylError> {
        if let Some(hit) = memo.get(w) {
            return Ok(hit.clone());
        }
        if w.is_identity() {
            return Ok(vec![vec![]]);
        }
        let mut out = Vec::new();
        for i in w.right_descents(system) {
            let shorter = w.mul(&WeylElement::simple_for(system, i));
            for mut word in rec(&shorter, system, cap, memo, budget)? {
                word.push(i);
                out.push(word);
                *budget -= 1;
                if *budget < 0 {
                    return Err(WeylError::CapExceeded(cap));
                }
            }
        }
        memo.insert(w.clone(), out.clone());
        Ok(out)
    }
    let mut memo = HashMap::new();
    let mut budget = cap as isize;
    let raw = rec(w, system, cap, &mut memo, &mut budget)?;
    Ok(raw
        .into_iter()
        .map(|letters| Word::new(system, letters).expect("valid letters"))
        .collect())
}

/// Default enumeration cap for reduced words.
pub const REDUCED_WORD_CAP: usize = 100_000;

/// Bruhat order via the lifting property: scan a reduced word of v from the
/// right, multiplying the target by each letter that shortens it; u <= v iff
/// the target ends at the identity. Cross-validated against exhaustive
/// subword search at small rank in the test suite.
pub fn bruhat_leq(u: &WeylElement, v: &WeylElement, system: System) -> bool {
    if u.length() > v.length() {
        return false;
    }
    let word = some_reduced_word(v, system);
    let mut target = u.clone();
    for &i in word.letters.iter().rev() {
        let s = WeylElement::simple_for(system, i);
        if target.mul(&s).length() < target.length() {
            target = target.mul(&s);
        }
    }
    target.is_identity()
}

/// Position classes of a masked word: kept letters either lengthen (Plus)
/// or shorten (Minus) the running prefix product; skipped letters are Circ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PosClass {
    Plus,
    Circ,
    Minus,
}

/// A reduced word together with a keep/skip mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subexpression {
    pub base: Word,
    pub mask: Vec<bool>,
}

impl Subexpression {
    pub fn new(base: Word, mask: Vec<bool>) -> Self {
        assert_eq!(base.letters.len(), mask.len(), "mask length");
        Subexpression { base, mask }
    }

    /// Product of the kept letters.
    pub fn element(&self) -> WeylElement {
        let mut acc = WeylElement::identity_for(self.base.system);
        for (k, &i) in self.base.letters.iter().enumerate() {
            if self.mask[k] {
                acc = acc.mul(&WeylElement::simple_for(self.base.system, i));
            }
        }
        acc
    }

    /// Classes from the prefix products u_(k).
    pub fn classification(&self) -> Vec<PosClass> {
        let mut out = Vec::with_capacity(self.mask.len());
        let mut u = WeylElement::identity_for(self.base.system);
        for (k, &i) in self.base.letters.iter().enumerate() {
            if !self.mask[k] {
                out.push(PosClass::Circ);
                continue;
            }
            let next = u.mul(&WeylElement::simple_for(self.base.system, i));
            out.push(if next.length() > u.length() {
                PosClass::Plus
            } else {
                PosClass::Minus
            });
            u = next;
        }
        out
    }

    /// Defining condition u_(j) <= u_(j-1) s_(i_j) on prefix products:
    /// equivalent to never skipping a letter that shortens the running
    /// product on the right.
    pub fn is_distinguished(&self) -> bool {
        let mut u = WeylElement::identity_for(self.base.system);
        for (k, &i) in self.base.letters.iter().enumerate() {
            let s = WeylElement::simple_for(self.base.system, i);
            let moved = u.mul(&s);
            if self.mask[k] {
                u = moved;
            } else if moved.length() < u.length() {
                return false;
            }
        }
        true
    }

    /// Mirror condition on suffix products: never skip a letter that
    /// shortens the remaining suffix product on the left.
    pub fn is_reverse_distinguished(&self) -> bool {
        // Suffix products, built right to left.
        let sys = self.base.system;
        let mut suffix = vec![WeylElement::identity_for(sys)];
        for (k, &i) in self.base.letters.iter().enumerate().rev() {
            let last = suffix.last().expect("nonempty").clone();
            let next = if self.mask[k] {
                WeylElement::simple_for(sys, i).mul(&last)
            } else {
                last
            };
            suffix.push(next);
        }
        suffix.reverse(); // suffix[k] = product of kept letters at positions >= k
        for (k, &i) in self.base.letters.iter().enumerate() {
            if !self.mask[k] {
                let s = WeylElement::simple_for(sys, i);
                if s.mul(&suffix[k + 1]).length() < suffix[k + 1].length() {
                    return false;
                }
            }
        }
        true
    }

    /// Count of kept positions.
    pub fn kept(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Greedy right to left; the unique reduced distinguished subexpression.
    Rightmost,
    /// Greedy left to right; the unique reduced reverse-distinguished one.
    Leftmost,
}

/// The canonical reduced (reverse-)distinguished subexpression for u inside
/// the reduced word v.
pub fn distinguished_subexpression(
    u: &WeylElement,
    v: &Word,
    direction: Direction,
) -> Result<Subexpression, WeylError> {
    let sys = v.system;
    let len = v.letters.len();
    let mut mask = vec![false; len];
    let mut target = u.clone();
    match direction {
        Direction::Rightmost => {
            for k in (0..len).rev() {
                let s = WeylElement::simple_for(sys, v.letters[k]);
                if target.mul(&s).length() < target.length() {
                    mask[k] = true;
                    target = target.mul(&s);
                }
            }
        }
        Direction::Leftmost => {
            for (k, &i) in v.letters.iter().enumerate() {
                let s = WeylElement::simple_for(sys, i);
                if s.mul(&target).length() < target.length() {
                    mask[k] = true;
                    target = s.mul(&target);
                }
            }
        }
    }
    if !target.is_identity() {
        return Err(WeylError::NotBruhatBelow);
    }
    Ok(Subexpression::new(v.clone(), mask))
}

/// The coset representative w^J: the unique element of the parabolic coset
/// of w whose one-line descent set avoids J, found by stripping one-line
/// descents that lie in J. It is the shortest element of its coset.
pub fn minimal_coset_rep(w: &WeylElement, j_set: &[usize], system: System) -> WeylElement {
    let mut cur = w.clone();
    loop {
        let step = j_set
            .iter()
            .copied()
            .find(|&j| WeylElement::simple_for(system, j).mul(&cur).length() < cur.length());
        match step {
            Some(j) => cur = WeylElement::simple_for(system, j).mul(&cur),
            None => return cur,
        }
    }
}

/// Image of one simple letter under the folding map into type A.
pub fn psi_block(system: System, i: usize) -> Result<Vec<usize>, WeylError> {
    match system {
        System::C(n) => {
            if i < 1 || i > n {
                Err(WeylError::BadLetter(i))
            } else if i < n {
                Ok(vec![i, 2 * n - i])
            } else {
                Ok(vec![n])
            }
        }
        System::B(n) => {
            if i < 1 || i > n {
                Err(WeylError::BadLetter(i))
            } else if i < n {
                Ok(vec![i, 2 * n + 1 - i])
            } else {
                Ok(vec![n, n + 1, n])
            }
        }
        System::A(_) => Err(WeylError::NotFoldable),
    }
}

fn folded_system(system: System) -> Result<System, WeylError> {
    match system {
        System::C(n) => Ok(System::A(2 * n - 1)),
        System::B(n) => Ok(System::A(2 * n)),
        System::A(_) => Err(WeylError::NotFoldable),
    }
}

/// Letterwise folding psi into type A.
pub fn fold_word(w: &Word) -> Result<Word, WeylError> {
    let target = folded_system(w.system)?;
    let mut letters = Vec::new();
    for &i in &w.letters {
        letters.extend(psi_block(w.system, i)?);
    }
    Word::new(target, letters)
}

/// Blockwise folding of a masked word: a kept letter keeps its whole block,
/// a skipped letter skips its whole block.
pub fn fold_subexpression(s: &Subexpression) -> Result<Subexpression, WeylError> {
    let base = fold_word(&s.base)?;
    let mut mask = Vec::with_capacity(base.letters.len());
    for (k, &i) in s.base.letters.iter().enumerate() {
        let block = psi_block(s.base.system, i)?.len();
        mask.extend(std::iter::repeat(s.mask[k]).take(block));
    }
    Ok(Subexpression::new(base, mask))
}

/// The sub-n component of the folding: each letter contributes only the
/// first (index <= n) factor of its block, which is the letter itself.
pub fn fold_leq_n(w: &Word) -> Result<Word, WeylError> {
    Word::new(folded_system(w.system)?, w.letters.clone())
}

/// The layered reduced expression for the longest element of B(n)/C(n):
/// s_n (s_{n-1} s_n) (s_{n-2} s_{n-1} s_n) ... then the staircase
/// (s_1)(s_2 s_1)...(s_{n-1} ... s_1). Length n^2.
pub fn w0_word(system: System) -> Word {
    let n = match system {
        System::B(n) | System::C(n) => n,
        System::A(_) => panic!("layered word is for types B and C"),
    };
    let mut letters = vec![n];
    for k in 1..n {
        letters.extend(n - k..=n - 1);
        letters.push(n);
    }
    for k in 1..n {
        letters.extend((1..=k).rev());
    }
    Word::new(system, letters).expect("valid letters")
}

/// A fixed reduced word for the longest element of A(r):
/// (1)(2,1)(3,2,1)...(r,...,1).
pub fn w0_word_a(r: usize) -> Word {
    let mut letters = Vec::with_capacity(r * (r + 1) / 2);
    for k in 1..=r {
        letters.extend((1..=k).rev());
    }
    Word::new(System::A(r), letters).expect("valid letters")
}

/// All signed permutations of [n]; order 2^n n!.
pub fn enumerate_signed(n: usize) -> Vec<WeylElement> {
    let mut out = Vec::new();
    let perms = permutations(n);
    for perm in &perms {
        for signs in 0..(1u32 << n) {
            let ol: Vec<i64> = perm
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if signs & (1 << i) != 0 {
                        -(v as i64)
                    } else {
                        v as i64
                    }
                })
                .collect();
            out.push(Signed(ol));
        }
    }
    out
}

/// All permutations of [n] in one-line notation.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(avail: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if avail.is_empty() {
            out.push(cur.clone());
            return;
        }
        for idx in 0..avail.len() {
            let v = avail.remove(idx);
            cur.push(v);
            rec(avail, cur, out);
            cur.pop();
            avail.insert(idx, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// First-entries agreement between minimal coset representatives on the two
/// sides of the folding: for K inside [n], the representative of w0 W_J in
/// the signed group (J = [n] minus K) and the representative of w0 W_J' in
/// the ambient symmetric group (J' = [N-1] minus K) act identically on the
/// first n ambient points.
pub fn coset_rep_first_entries_agree(system: System, k_set: &[usize]) -> bool {
    let n = system.rank();
    let ambient = system.ambient();
    let j: Vec<usize> = (1..=n).filter(|i| !k_set.contains(i)).collect();
    let rep_phi = minimal_coset_rep(&longest_element(system), &j, system);
    let amb_phi = match system {
        System::C(_) => rep_phi.to_ambient_even(),
        System::B(_) => rep_phi.to_ambient_odd(),
        System::A(_) => panic!("folding comparison needs B or C"),
    };
    let a_sys = System::A(ambient - 1);
    let j_prime: Vec<usize> = (1..ambient).filter(|i| !k_set.contains(i)).collect();
    let rep_a = minimal_coset_rep(&longest_element(a_sys), &j_prime, a_sys);
    let TypeA(amb_a) = rep_a else { unreachable!() };
    (0..n).all(|i| amb_phi[i] == amb_a[i])
}
