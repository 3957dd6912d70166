//! Finite-dimensional graded spaces with object-tagged bases.
//!
//! A small category's hom spaces are flattened into one total graded space:
//! each basis element carries `(src, tgt)` object tags and a tensor word is
//! admissible only when consecutive tags chain (the factor to the right maps
//! *into* the source of the factor to its left, matching composition order).
//! A plain algebra or complex is the one-object case where every tag is 0.

use crate::field::{FieldSpec, K};
use std::collections::BTreeMap;
use std::fmt;

/// One basis vector: a name, an integer degree, and object tags.
/// An element of a hom space `Hom(src, tgt)` points from `src` to `tgt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElt {
    pub name: String,
    pub degree: i64,
    pub src: usize,
    pub tgt: usize,
}

/// A finite-dimensional graded space over a fixed field, with an ordered
/// basis. Ordering is part of the data: all serialization, elimination and
/// reporting is deterministic in this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    pub field: FieldSpec,
    /// Object names; basis tags index into this list.
    pub objects: Vec<String>,
    pub basis: Vec<BasisElt>,
}

impl Space {
    /// A one-object space from `(name, degree)` pairs.
    pub fn simple(field: FieldSpec, basis: &[(&str, i64)]) -> Space {
        Space {
            field,
            objects: vec!["*".to_string()],
            basis: basis
                .iter()
                .map(|(n, d)| BasisElt {
                    name: n.to_string(),
                    degree: *d,
                    src: 0,
                    tgt: 0,
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    /// Checks tag ranges and name uniqueness per `(src, tgt)` pair.
    pub fn validate(&self) -> Result<(), String> {
        self.field.validate()?;
        let mut seen = BTreeMap::new();
        for (i, b) in self.basis.iter().enumerate() {
            if b.src >= self.objects.len() || b.tgt >= self.objects.len() {
                return Err(format!("basis element {:?} has out-of-range object tag", b.name));
            }
            if let Some(j) = seen.insert((b.src, b.tgt, b.name.clone()), i) {
                return Err(format!(
                    "duplicate basis name {:?} in hom({}, {}) at positions {j} and {i}",
                    b.name, self.objects[b.src], self.objects[b.tgt]
                ));
            }
        }
        Ok(())
    }

    /// The suspension `S^k`: same names and tags, every degree lowered by `k`.
    pub fn suspend(&self, k: i64) -> Space {
        Space {
            field: self.field,
            objects: self.objects.clone(),
            basis: self
                .basis
                .iter()
                .map(|b| BasisElt {
                    name: b.name.clone(),
                    degree: b.degree - k,
                    src: b.src,
                    tgt: b.tgt,
                })
                .collect(),
        }
    }

    /// Index of the named element in `hom(src, tgt)`.
    pub fn find(&self, name: &str, src: usize, tgt: usize) -> Option<usize> {
        self.basis
            .iter()
            .position(|b| b.name == name && b.src == src && b.tgt == tgt)
    }

    /// Index by name alone; unambiguous for one-object spaces with unique names.
    pub fn find_by_name(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// Is the two-letter word `left ⊗ right` composable? (`right` feeds into
    /// `left`: the target of `right` must be the source of `left`.)
    pub fn chains(&self, left: usize, right: usize) -> bool {
        self.basis[left].src == self.basis[right].tgt
    }

    /// All indices whose `(src, tgt)` tags equal the given pair.
    pub fn hom_indices(&self, src: usize, tgt: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.basis[i].src == src && self.basis[i].tgt == tgt)
            .collect()
    }

    pub fn word_degree(&self, word: &[usize]) -> i64 {
        word.iter().map(|&i| self.basis[i].degree).sum()
    }

    /// Is a tensor word admissible (consecutive tags chain)?
    pub fn word_chains(&self, word: &[usize]) -> bool {
        word.windows(2).all(|w| self.chains(w[0], w[1]))
    }

    /// All admissible words of exactly the given length, lexicographic order.
    pub fn words(&self, len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        self.words_rec(len, &mut cur, &mut out);
        out
    }

    fn words_rec(&self, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..self.dim() {
            // Letters are appended on the right; the new letter must feed the
            // previous one.
            if let Some(&prev) = cur.last() {
                if !self.chains(prev, i) {
                    continue;
                }
            }
            cur.push(i);
            self.words_rec(len, cur, out);
            cur.pop();
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "space[{}; dim {}]", self.field, self.dim())
    }
}

/// A sparse vector: strictly increasing indices, no zero coefficients.
pub type Sv = Vec<(usize, K)>;

/// Normalizes arbitrary (index, coeff) pairs into a sparse vector.
pub fn sv_normalize(mut pairs: Vec<(usize, K)>) -> Sv {
    pairs.sort_by_key(|(i, _)| *i);
    let mut out: Sv = Vec::with_capacity(pairs.len());
    for (i, c) in pairs {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = acc.add(&c),
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

pub fn sv_add(a: &Sv, b: &Sv) -> Sv {
    let mut pairs = a.clone();
    pairs.extend(b.iter().cloned());
    sv_normalize(pairs)
}

pub fn sv_sub(a: &Sv, b: &Sv) -> Sv {
    let mut pairs = a.clone();
    pairs.extend(b.iter().map(|(i, c)| (*i, c.neg())));
    sv_normalize(pairs)
}

pub fn sv_scale(a: &Sv, c: &K) -> Sv {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x.mul(c))).collect()
}

pub fn sv_neg(a: &Sv) -> Sv {
    a.iter().map(|(i, x)| (*i, x.neg())).collect()
}

/// Coefficient of index `i` (zero scalar if absent).
pub fn sv_coeff(a: &Sv, i: usize, field: FieldSpec) -> K {
    a.iter()
        .find(|(j, _)| *j == i)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(|| field.zero())
}

/// A single basis vector as a sparse vector.
pub fn sv_unit(i: usize, field: FieldSpec) -> Sv {
    vec![(i, field.one())]
}

/// Renders a sparse vector against a space's basis names, for witnesses.
pub fn sv_render(a: &Sv, sp: &Space) -> String {
    if a.is_empty() {
        return "0".to_string();
    }
    a.iter()
        .map(|(i, c)| format!("{}·{}", c, sp.basis[*i].name))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Is the sparse vector homogeneous of one degree? Returns that degree.
pub fn sv_degree(a: &Sv, sp: &Space) -> Option<i64> {
    let mut deg = None;
    for (i, _) in a {
        let d = sp.degree(*i);
        match deg {
            None => deg = Some(d),
            Some(e) if e != d => return None,
            _ => {}
        }
    }
    deg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn sparse_vector_normalization() {
        let one = f().one();
        let raw = vec![(3, one.clone()), (1, one.clone()), (3, one.neg())];
        assert_eq!(sv_normalize(raw), vec![(1, one)]);
    }

    #[test]
    fn word_enumeration_respects_chains() {
        // Two objects a, b; x: a -> b, y: b -> a, e: a -> a.
        let sp = Space {
            field: f(),
            objects: vec!["a".into(), "b".into()],
            basis: vec![
                BasisElt { name: "x".into(), degree: 0, src: 0, tgt: 1 },
                BasisElt { name: "y".into(), degree: 1, src: 1, tgt: 0 },
                BasisElt { name: "e".into(), degree: 0, src: 0, tgt: 0 },
            ],
        };
        sp.validate().unwrap();
        let w2 = sp.words(2);
        // Admissible two-letter words: x·y, x·e, y·x, e·y, e·e.
        assert_eq!(w2.len(), 5);
        for w in &w2 {
            assert!(sp.word_chains(w));
        }
        assert!(w2.contains(&vec![0, 1]));
        assert!(!w2.contains(&vec![0, 0]));
    }

    #[test]
    fn suspension_shifts_degrees() {
        let sp = Space::simple(f(), &[("x", 2), ("y", 0)]);
        let s = sp.suspend(1);
        assert_eq!(s.degree(0), 1);
        assert_eq!(s.degree(1), -1);
        assert_eq!(s.suspend(-1), sp);
    }
}
