//! Conjugacy machinery for `U(n,q)`: the index order on strictly-lower positions,
//! weights, the normal series `G_(r,s)`, inert points and canonical matrices.
//!
//! Quotients `U(n,q)/G_(r,s)` are handled by truncation: the entries at positions
//! `<= (r,s)` form a prefix of the index-ordered storage, and products restricted to
//! that prefix only read entries inside it.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gf::FieldTable;
use crate::trimat::{sub_index, sub_positions, Dense, KeySpace, TriMatrix, MAX_DIM};

/// A strictly-lower position `(r, s)`, `1 <= s < r <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexPair {
    pub r: usize,
    pub s: usize,
}

impl IndexPair {
    pub fn new(r: usize, s: usize) -> Self {
        IndexPair { r, s }
    }

    pub fn validate(self, n: usize) -> Result<Self> {
        if 1 <= self.s && self.s < self.r && self.r <= n {
            Ok(self)
        } else {
            Err(Error::InvalidArgument(format!("({},{}) is not a strictly-lower position for n={n}", self.r, self.s)))
        }
    }

    /// Rank in the index order (0 for `(n, n-1)`).
    pub fn position(self, n: usize) -> usize {
        sub_index(n, self.r, self.s)
    }

    /// The largest pair `(n, 1)`.
    pub fn greatest(n: usize) -> Self {
        IndexPair { r: n, s: 1 }
    }

    pub fn least(n: usize) -> Self {
        IndexPair { r: n, s: n - 1 }
    }
}

impl Ord for IndexPair {
    fn cmp(&self, other: &Self) -> Ordering {
        other.s.cmp(&self.s).then(self.r.cmp(&other.r))
    }
}

impl PartialOrd for IndexPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

pub fn pair_order_iter(n: usize) -> impl Iterator<Item = IndexPair> {
    sub_positions(n).map(|(r, s)| IndexPair { r, s })
}

/// 0/1 pattern of nonzero entries at the positions `<= anchor`, compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    pub anchor: IndexPair,
    pub bits: Vec<bool>,
}

impl Ord for WeightVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits.cmp(&other.bits)
    }
}

impl PartialOrd for WeightVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn weight(a: &TriMatrix, anchor: IndexPair) -> Result<WeightVector> {
    let anchor = anchor.validate(a.n())?;
    let bits = a.sub()[..=anchor.position(a.n())]
        .iter()
        .map(|x| !x.is_zero())
        .collect();
    Ok(WeightVector { anchor, bits })
}

/// Shape of the normal subgroup `G_(r,s)`: matrices vanishing at every position `<= (r,s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientShape {
    pub anchor: IndexPair,
    pub order_exponent: usize,
    pub order: BigUint,
    /// Positions `> anchor`, i.e. the coordinates of `G_(r,s)`.
    pub free_positions: Vec<IndexPair>,
}

pub fn quotient_shape(n: usize, q: usize, anchor: IndexPair) -> Result<QuotientShape> {
    let anchor = anchor.validate(n)?;
    let free_positions: Vec<_> = pair_order_iter(n).filter(|&p| p > anchor).collect();
    let order_exponent = n * anchor.s - anchor.r - anchor.s * (anchor.s - 1) / 2;
    if order_exponent != free_positions.len() {
        return Err(Error::Postcondition(format!(
            "G{anchor} has {} free positions, expected {order_exponent}",
            free_positions.len()
        )));
    }
    Ok(QuotientShape {
        anchor,
        order_exponent,
        order: BigUint::from(q).pow(order_exponent as u32),
        free_positions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Unitriangular,
    Triangular,
}

/// Hard limits for the brute-force oracles.
#[derive(Debug, Clone, Copy)]
pub struct DeskLimits {
    /// Largest group (or quotient) order the oracles will walk.
    pub max_group: u128,
}

impl Default for DeskLimits {
    fn default() -> Self {
        DeskLimits { max_group: 1 << 24 }
    }
}

impl DeskLimits {
    fn check(&self, what: impl FnOnce() -> String, required: u128) -> Result<()> {
        if required > self.max_group {
            Err(Error::SizeGuard {
                what: what(),
                required,
                limit: self.max_group,
            })
        } else {
            Ok(())
        }
    }
}

fn group_order(n: usize, q: usize, ambient: Ambient) -> u128 {
    let mut order = (q as u128).saturating_pow((n * n.saturating_sub(1) / 2) as u32);
    if ambient == Ambient::Triangular {
        order = order.saturating_mul(((q - 1) as u128).saturating_pow(n as u32));
    }
    order
}

/// Breadth-first closure of `start` under conjugation by the standard generators.
/// With `prefix = Some(k)`, everything past index position `k` is zeroed after each
/// step, which walks the class in `U/G` for the anchor at position `k`.
fn orbit_keys(
    start: &Dense,
    space: &KeySpace,
    f: &FieldTable,
    ambient: Ambient,
    prefix: Option<usize>,
) -> HashSet<u64> {
    let n = start.n;
    let cut: Vec<(usize, usize)> = match prefix {
        Some(k) => sub_positions(n)
            .enumerate()
            .filter(|&(idx, _)| idx > k)
            .map(|(_, (i, j))| (i - 1, j - 1))
            .collect(),
        None => Vec::new(),
    };
    let truncate = |d: &mut Dense| {
        for &(i, j) in &cut {
            d.e[i][j] = 0;
        }
    };
    let mut first = *start;
    truncate(&mut first);

    let mut seen = HashSet::new();
    seen.insert(space.encode_dense(&first));
    let mut frontier = vec![first];
    let q = f.order();
    while let Some(x) = frontier.pop() {
        for row in 0..n.saturating_sub(1) {
            for lambda in 1..q as u8 {
                let mut y = x;
                y.conjugate_elementary(row, lambda, f);
                truncate(&mut y);
                if seen.insert(space.encode_dense(&y)) {
                    frontier.push(y);
                }
            }
        }
        if ambient == Ambient::Triangular {
            for pos in 0..n {
                for lambda in 2..q as u8 {
                    let mut y = x;
                    y.conjugate_diagonal(pos, lambda, f);
                    truncate(&mut y);
                    if seen.insert(space.encode_dense(&y)) {
                        frontier.push(y);
                    }
                }
            }
        }
    }
    seen
}

fn check_dense(a: &TriMatrix) -> Result<()> {
    if a.n() > MAX_DIM {
        return Err(Error::InvalidArgument(format!("orbit oracles support n <= {MAX_DIM}")));
    }
    Ok(())
}

fn space_for(a: &TriMatrix) -> Result<KeySpace> {
    if a.is_unitriangular() {
        KeySpace::unitriangular(a.n(), a.field().order())
    } else if a.is_invertible() {
        KeySpace::triangular(a.n(), a.field().order())
    } else {
        Err(Error::NotInvertible)
    }
}

/// The conjugacy class `{B^-1 A B}` of `A` in the ambient group, sorted by packed key.
pub fn class_of(a: &TriMatrix, ambient: Ambient, limits: &DeskLimits) -> Result<Vec<TriMatrix>> {
    let (space, keys) = class_keys(a, ambient, limits)?;
    let mut keys: Vec<u64> = keys.into_iter().collect();
    keys.sort_unstable();
    keys.into_iter().map(|k| space.decode(a.field(), k)).collect()
}

pub fn class_size(a: &TriMatrix, ambient: Ambient, limits: &DeskLimits) -> Result<usize> {
    class_keys(a, ambient, limits).map(|(_, keys)| keys.len())
}

pub(crate) fn class_keys(
    a: &TriMatrix,
    ambient: Ambient,
    limits: &DeskLimits,
) -> Result<(KeySpace, HashSet<u64>)> {
    check_dense(a)?;
    let q = a.field().order();
    limits.check(
        || format!("conjugacy orbit in {ambient:?}({}, {q}) (group elements)", a.n()),
        group_order(a.n(), q, ambient),
    )?;
    let space = space_for(a)?;
    let start = Dense::from_tri(a)?;
    let keys = orbit_keys(&start, &space, a.field(), ambient, None);
    Ok((space, keys))
}

/// Number of conjugacy classes of `U(n,q)/G_(r,s)` meeting the coset `A N_(r,s)`,
/// i.e. the lifts of `A G_(r,s)*` obtained by letting the `(r,s)` entry range over GF(q).
pub fn quotient_class_count(a: &TriMatrix, anchor: IndexPair, limits: &DeskLimits) -> Result<usize> {
    check_dense(a)?;
    if !a.is_unitriangular() {
        return Err(Error::NotUnitriangular);
    }
    let n = a.n();
    let anchor = anchor.validate(n)?;
    let f = a.field();
    let q = f.order();
    let pos = anchor.position(n);
    limits.check(
        || format!("quotient U({n},{q})/G{anchor} (elements)"),
        (q as u128).saturating_pow(pos as u32 + 1),
    )?;
    let space = KeySpace::unitriangular(n, q)?;
    let base = Dense::from_tri(a)?;
    let lifts: Vec<Dense> = (0..q as u8)
        .map(|v| {
            let mut d = base;
            d.e[anchor.r - 1][anchor.s - 1] = v;
            for (idx, (i, j)) in sub_positions(n).enumerate() {
                if idx > pos {
                    d.e[i - 1][j - 1] = 0;
                }
            }
            d
        })
        .collect();
    let lift_keys: Vec<u64> = lifts.iter().map(|d| space.encode_dense(d)).collect();
    let mut assigned = vec![false; q];
    let mut classes = 0;
    for v in 0..q {
        if assigned[v] {
            continue;
        }
        classes += 1;
        let orbit = orbit_keys(&lifts[v], &space, f, Ambient::Unitriangular, Some(pos));
        for (w, key) in lift_keys.iter().enumerate() {
            if orbit.contains(key) {
                assigned[w] = true;
            }
        }
    }
    Ok(classes)
}

pub fn inert_point_test(a: &TriMatrix, anchor: IndexPair, limits: &DeskLimits) -> Result<bool> {
    quotient_class_count(a, anchor, limits).map(|c| c == 1)
}

/// Every inert point of `A`, in index order.
pub fn inert_points(a: &TriMatrix, limits: &DeskLimits) -> Result<Vec<IndexPair>> {
    let mut out = Vec::new();
    for pair in pair_order_iter(a.n()) {
        if inert_point_test(a, pair, limits)? {
            out.push(pair);
        }
    }
    Ok(out)
}

/// Whether `A G_(r,s)` is the unique element of minimal `(r,s)`-weight in its class of
/// `U/G_(r,s)`, for every anchor. Quotient classes are projections of the class of `A`.
pub fn is_canonical(a: &TriMatrix, limits: &DeskLimits) -> Result<bool> {
    if !a.is_unitriangular() {
        return Err(Error::NotUnitriangular);
    }
    let n = a.n();
    if n < 2 {
        return Ok(true);
    }
    let (space, keys) = class_keys(a, Ambient::Unitriangular, limits)?;
    let q = a.field().order() as u64;
    let digits = |key: u64| -> Vec<u8> {
        let mut rest = key;
        (0..space.positions().len())
            .map(|_| {
                let d = (rest % q) as u8;
                rest /= q;
                d
            })
            .collect()
    };
    let members: Vec<Vec<u8>> = keys.iter().map(|&k| digits(k)).collect();
    let own = digits(space.encode(a)?.digits);
    for pos in 0..space.positions().len() {
        let own_prefix = &own[..=pos];
        let own_weight: Vec<bool> = own_prefix.iter().map(|&d| d != 0).collect();
        for m in &members {
            let prefix = &m[..=pos];
            if prefix == own_prefix {
                continue;
            }
            let w: Vec<bool> = prefix.iter().map(|&d| d != 0).collect();
            if w <= own_weight {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Inert points guaranteed for a canonical `A` by the column criterion: for each nonzero
/// `a_rs` whose column `s` vanishes strictly between rows `s` and `r`, every `(r, s')` with
/// `s' < s`.
pub fn column_rule_inert(a: &TriMatrix) -> BTreeSet<IndexPair> {
    let mut out = BTreeSet::new();
    for (r, s) in sub_positions(a.n()) {
        if a.get(r, s).is_zero() {
            continue;
        }
        if (s + 1..r).all(|j| a.get(j, s).is_zero()) {
            out.extend((1..s).map(|t| IndexPair::new(r, t)));
        }
    }
    out
}

/// Inert points guaranteed for a canonical `A` by the row criterion: for each nonzero
/// `a_rs` whose row `r` vanishes strictly between columns `s` and `r`, every `(r', s)` with
/// `r' > r` whose column `r'` is zero below the diagonal.
pub fn row_rule_inert(a: &TriMatrix) -> BTreeSet<IndexPair> {
    let n = a.n();
    let mut out = BTreeSet::new();
    for (r, s) in sub_positions(n) {
        if a.get(r, s).is_zero() {
            continue;
        }
        if (s + 1..r).all(|i| a.get(r, i).is_zero()) {
            for rp in r + 1..=n {
                if (rp + 1..=n).all(|j| a.get(j, rp).is_zero()) {
                    out.insert(IndexPair::new(rp, s));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldElement;
    use std::sync::Arc;

    fn gf(q: u64) -> Arc<FieldTable> {
        FieldTable::for_order(q).unwrap()
    }

    #[test]
    fn order_of_pairs() {
        let v: Vec<_> = pair_order_iter(3).collect();
        assert_eq!(v, vec![IndexPair::new(3, 2), IndexPair::new(2, 1), IndexPair::new(3, 1)]);
        let v4: Vec<_> = pair_order_iter(4).collect();
        assert_eq!(v4.len(), 6);
        assert_eq!(v4[0], IndexPair::new(4, 3));
        assert!(v4.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*v4.last().unwrap(), IndexPair::greatest(4));
        assert!(IndexPair::new(4, 2) < IndexPair::new(2, 1));
        assert!(IndexPair::new(3, 1) < IndexPair::new(4, 1));
    }

    #[test]
    fn weights() {
        let f = gf(3);
        let n = 4;
        let id = TriMatrix::identity(&f, n);
        assert!(weight(&id, IndexPair::greatest(n)).unwrap().bits.iter().all(|b| !b));
        let top = TriMatrix::identity_plus(&f, n, &[(n, 1, FieldElement::ONE)]);
        let w = weight(&top, IndexPair::greatest(n)).unwrap();
        assert_eq!(w.bits.iter().filter(|&&b| b).count(), 1);
        assert!(*w.bits.last().unwrap());
        assert!(weight(&id, IndexPair::new(2, 3)).is_err());
    }

    #[test]
    fn quotient_orders() {
        assert_eq!(quotient_shape(4, 2, IndexPair::new(4, 1)).unwrap().order_exponent, 0);
        let s = quotient_shape(4, 3, IndexPair::new(4, 3)).unwrap();
        assert_eq!(s.order_exponent, 5);
        assert_eq!(s.order, BigUint::from(243u32));
        let s = quotient_shape(5, 2, IndexPair::new(5, 4)).unwrap();
        assert_eq!(s.order_exponent, 9);
        assert_eq!(s.free_positions.len(), 9);
        for n in 2..=7 {
            for pair in pair_order_iter(n) {
                quotient_shape(n, 2, pair).unwrap();
            }
        }
    }

    #[test]
    fn identity_class_and_inertness() {
        let f = gf(3);
        let id = TriMatrix::identity(&f, 4);
        let limits = DeskLimits::default();
        assert_eq!(class_of(&id, Ambient::Unitriangular, &limits).unwrap(), vec![id.clone()]);
        // I is central, so its lifts at any anchor stay in pairwise distinct classes
        for pair in pair_order_iter(4) {
            assert_eq!(quotient_class_count(&id, pair, &limits).unwrap(), 3);
        }
        assert!(inert_points(&id, &limits).unwrap().is_empty());
        assert!(is_canonical(&id, &limits).unwrap());
    }

    #[test]
    fn non_canonical_example() {
        let f = gf(2);
        let one = FieldElement::ONE;
        let a = TriMatrix::identity_plus(&f, 3, &[(2, 1, one), (3, 1, one)]);
        let b = TriMatrix::identity_plus(&f, 3, &[(2, 1, one)]);
        let limits = DeskLimits::default();
        let class = class_of(&a, Ambient::Unitriangular, &limits).unwrap();
        assert!(class.contains(&b));
        assert!(!is_canonical(&a, &limits).unwrap());
        assert!(is_canonical(&b, &limits).unwrap());
    }

    #[test]
    fn class_of_matches_full_double_loop() {
        let f = gf(3);
        let space = KeySpace::unitriangular(3, 3).unwrap();
        let all: Vec<TriMatrix> = (0..space.size()).map(|k| space.decode(&f, k).unwrap()).collect();
        for a in &all {
            let mut brute: Vec<TriMatrix> = all.iter().map(|b| a.conjugate_by(b).unwrap()).collect();
            brute.sort_by_key(|m| space.encode(m).unwrap().digits);
            brute.dedup();
            assert_eq!(class_of(a, Ambient::Unitriangular, &DeskLimits::default()).unwrap(), brute);
        }
    }

    #[test]
    fn triangular_ambient_classes() {
        let f = gf(3);
        let t = KeySpace::triangular(2, 3).unwrap();
        let all: Vec<TriMatrix> = (0..t.size()).map(|k| t.decode(&f, k).unwrap()).collect();
        for a in &all {
            let mut brute: Vec<TriMatrix> = all.iter().map(|b| a.conjugate_by(b).unwrap()).collect();
            brute.sort_by_key(|m| t.encode(m).unwrap().digits);
            brute.dedup();
            let mut fast = class_of(a, Ambient::Triangular, &DeskLimits::default()).unwrap();
            fast.sort_by_key(|m| t.encode(m).unwrap().digits);
            assert_eq!(fast, brute);
        }
    }

    #[test]
    fn size_guard() {
        let f = gf(2);
        let id = TriMatrix::identity(&f, 6);
        let tiny = DeskLimits { max_group: 100 };
        assert!(matches!(class_of(&id, Ambient::Unitriangular, &tiny), Err(Error::SizeGuard { .. })));
    }
}
