//! Finite groups (the grading group) and characters of abelian ones.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{root_of_unity, Scalar};

/// Index of a group element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem(pub usize);

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    /// Row-major `[a * order + b]`.
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table is not {0}x{0}")]
    Shape(usize),
    #[error("table entry out of range at ({0}, {1})")]
    Range(usize, usize),
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    Associativity(usize, usize, usize),
    #[error("group is not abelian; characters are undefined")]
    NotAbelian,
    #[error("map is not a group homomorphism: images of {0} and {1} do not multiply")]
    NotHomomorphism(usize, usize),
    #[error("homomorphism is not injective: {0} and {1} collide")]
    NotInjective(usize, usize),
}

impl FiniteGroup {
    /// Build and fully validate a group from a multiplication table.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(GroupError::Shape(n));
        }
        let mut mul = vec![0usize; n * n];
        for (a, row) in table.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if c >= n {
                    return Err(GroupError::Range(a, b));
                }
                mul[a * n + b] = c;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e * n + a] == a && mul[a * n + e] == a))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| mul[a * n + b] == identity && mul[b * n + a] == identity)
                .ok_or(GroupError::NoInverse(a))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a * n + b] * n + c] != mul[a * n + mul[b * n + c]] {
                        return Err(GroupError::Associativity(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            labels,
            mul,
            inv,
            identity,
        })
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    /// Cyclic group `Z/n` with elements labelled `0..n-1`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs n >= 1");
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut mul = vec![0usize; n * n];
        let mut inv = vec![0usize; n];
        for a in 0..n {
            for b in 0..n {
                mul[a * n + b] = (a + b) % n;
            }
            inv[a] = (n - a) % n;
        }
        FiniteGroup {
            labels,
            mul,
            inv,
            identity: 0,
        }
    }

    /// Direct product, elements ordered row-major with labels `"a,b"`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.order(), b.order());
        let n = na * nb;
        let enc = |x: usize, y: usize| x * nb + y;
        let labels: Vec<String> = (0..na)
            .flat_map(|x| {
                (0..nb)
                    .map(|y| format!("{},{}", a.labels[x], b.labels[y]))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut mul = vec![0usize; n * n];
        let mut inv = vec![0usize; n];
        for xa in 0..na {
            for ya in 0..nb {
                let p = enc(xa, ya);
                inv[p] = enc(a.inv[xa], b.inv[ya]);
                for xb in 0..na {
                    for yb in 0..nb {
                        let q = enc(xb, yb);
                        mul[p * n + q] = enc(a.mul[xa * na + xb], b.mul[ya * nb + yb]);
                    }
                }
            }
        }
        FiniteGroup {
            labels,
            mul,
            inv,
            identity: enc(a.identity, b.identity),
        }
    }

    /// The symmetric group S3, for nonabelian-grading tests.
    pub fn symmetric3() -> Self {
        // Elements: e, r, r2 (rotations), s, rs, r2s (reflections).
        let labels = ["e", "r", "r2", "s", "rs", "r2s"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        // r^3 = s^2 = e, s r = r^2 s.
        let idx = |rot: usize, refl: usize| refl * 3 + rot;
        let mut table = vec![vec![0usize; 6]; 6];
        for r1 in 0..3 {
            for f1 in 0..2 {
                for r2 in 0..3 {
                    for f2 in 0..2 {
                        // (r^r1 s^f1)(r^r2 s^f2): move s past r using s r = r^{-1} s.
                        let r2_adj = if f1 == 1 { (3 - r2) % 3 } else { r2 };
                        let rot = (r1 + r2_adj) % 3;
                        let refl = (f1 + f2) % 2;
                        table[idx(r1, f1)][idx(r2, f2)] = idx(rot, refl);
                    }
                }
            }
        }
        FiniteGroup::from_table(labels, table).expect("S3 table is a group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> {
        (0..self.order()).map(GroupElem)
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem(self.identity)
    }

    pub fn mul(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        GroupElem(self.mul[a.0 * self.order() + b.0])
    }

    pub fn inv(&self, a: GroupElem) -> GroupElem {
        GroupElem(self.inv[a.0])
    }

    pub fn label(&self, a: GroupElem) -> &str {
        &self.labels[a.0]
    }

    pub fn elem_by_label(&self, label: &str) -> Option<GroupElem> {
        self.labels.iter().position(|l| l == label).map(GroupElem)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a * n + b] == self.mul[b * n + a]))
    }

    pub fn element_order(&self, a: GroupElem) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity() {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Exponent: lcm of the element orders.
    pub fn exponent(&self) -> usize {
        self.elements().map(|a| self.element_order(a)).fold(1, lcm)
    }

    /// All characters of an abelian group, enumerated by consistent
    /// extension of root-of-unity assignments on a generating set.
    ///
    /// Phases are tracked as integers modulo the group exponent, so the
    /// table is exact; only the final realization as complex numbers is
    /// floating point.
    pub fn characters<T: Scalar>(&self) -> Result<Vec<Character<T>>, GroupError> {
        if !self.is_abelian() {
            return Err(GroupError::NotAbelian);
        }
        let n = self.order();
        let exp = self.exponent() as i64;

        // Greedy generating set: repeatedly adjoin the smallest element
        // outside the current span.
        let mut gens: Vec<GroupElem> = Vec::new();
        let mut span = self.subgroup_span(&gens);
        while span.len() < n {
            let g = self
                .elements()
                .find(|e| !span.contains(&e.0))
                .expect("span is proper");
            gens.push(g);
            span = self.subgroup_span(&gens);
        }

        let orders: Vec<i64> = gens.iter().map(|&g| self.element_order(g) as i64).collect();
        let mut found: Vec<Vec<i64>> = Vec::new();
        let mut assignment = vec![0i64; gens.len()];
        self.enumerate_characters(&gens, &orders, exp, 0, &mut assignment, &mut found);
        debug_assert_eq!(found.len(), n, "abelian group has |G| characters");

        found.sort();
        Ok(found
            .into_iter()
            .map(|phases| Character {
                values: phases.iter().map(|&p| root_of_unity::<T>(p, exp)).collect(),
            })
            .collect())
    }

    fn subgroup_span(&self, gens: &[GroupElem]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut stack = vec![self.identity()];
        while let Some(x) = stack.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !seen[y.0] {
                        seen[y.0] = true;
                        stack.push(y);
                    }
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    fn enumerate_characters(
        &self,
        gens: &[GroupElem],
        orders: &[i64],
        exp: i64,
        depth: usize,
        assignment: &mut Vec<i64>,
        found: &mut Vec<Vec<i64>>,
    ) {
        if depth == gens.len() {
            if let Some(phases) = self.extend_character(gens, assignment, exp) {
                found.push(phases);
            }
            return;
        }
        let step = exp / orders[depth];
        for k in 0..orders[depth] {
            assignment[depth] = k * step;
            self.enumerate_characters(gens, orders, exp, depth + 1, assignment, found);
        }
    }

    /// Extend generator phases to the whole group; `None` on inconsistency.
    fn extend_character(
        &self,
        gens: &[GroupElem],
        gen_phase: &[i64],
        exp: i64,
    ) -> Option<Vec<i64>> {
        let n = self.order();
        let mut phase: Vec<Option<i64>> = vec![None; n];
        phase[self.identity] = Some(0);
        let mut stack = vec![self.identity()];
        while let Some(x) = stack.pop() {
            let px = phase[x.0].unwrap();
            for (i, &g) in gens.iter().enumerate() {
                let y = self.mul(x, g);
                let py = (px + gen_phase[i]).rem_euclid(exp);
                match phase[y.0] {
                    None => {
                        phase[y.0] = Some(py);
                        stack.push(y);
                    }
                    Some(q) if q != py => return None,
                    _ => {}
                }
            }
        }
        phase.into_iter().collect()
    }

    /// Validate that `map[g]` defines a homomorphism into `target`.
    pub fn check_homomorphism(
        &self,
        target: &FiniteGroup,
        map: &[GroupElem],
    ) -> Result<(), GroupError> {
        assert_eq!(map.len(), self.order(), "map must cover the group");
        for a in self.elements() {
            for b in self.elements() {
                let lhs = map[self.mul(a, b).0];
                let rhs = target.mul(map[a.0], map[b.0]);
                if lhs != rhs {
                    return Err(GroupError::NotHomomorphism(a.0, b.0));
                }
            }
        }
        Ok(())
    }

    /// Validate a homomorphism that must also be injective.
    pub fn check_injective_homomorphism(
        &self,
        target: &FiniteGroup,
        map: &[GroupElem],
    ) -> Result<(), GroupError> {
        self.check_homomorphism(target, map)?;
        for a in self.elements() {
            for b in self.elements() {
                if a < b && map[a.0] == map[b.0] {
                    return Err(GroupError::NotInjective(a.0, b.0));
                }
            }
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A character of an abelian group: a homomorphism into the circle.
#[derive(Clone, Debug)]
pub struct Character<T> {
    values: Vec<Complex<T>>,
}

impl<T: Scalar> Character<T> {
    /// Wrap explicit values, verifying the homomorphism property within
    /// `tol` and unit modulus of every value.
    pub fn new(group: &FiniteGroup, values: Vec<Complex<T>>, tol: T) -> Result<Self, GroupError> {
        assert_eq!(values.len(), group.order());
        for a in group.elements() {
            if (values[a.0].norm() - T::one()).abs() > tol {
                return Err(GroupError::NotHomomorphism(a.0, a.0));
            }
            for b in group.elements() {
                let lhs = values[group.mul(a, b).0];
                let rhs = values[a.0] * values[b.0];
                if (lhs - rhs).norm() > tol {
                    return Err(GroupError::NotHomomorphism(a.0, b.0));
                }
            }
        }
        Ok(Character { values })
    }

    pub fn value(&self, g: GroupElem) -> Complex<T> {
        self.values[g.0]
    }

    pub fn is_trivial(&self, tol: T) -> bool {
        self.values
            .iter()
            .all(|z| (*z - Complex::new(T::one(), T::zero())).norm() <= tol)
    }
}
