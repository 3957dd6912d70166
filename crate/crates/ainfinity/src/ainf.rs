//! Strongly homotopy associative structures on a graded space (one object:
//! an algebra; several objects: a small category with object-indexed homs
//! flattened into one tagged space).
//!
//! Operations are stored on the shifted side: `b_i : (SA)^{⊗i} → SA` of
//! degree `+1` for `1 ≤ i ≤ max_arity`, with `b_i := 0` for `i > max_arity`
//! as part of the semantics (the structure *is* the finite family). On the
//! shifted side the defining identities are sign-free:
//! `Σ_{j+k+l=m} b_{j+1+l} ∘ (1^{⊗j} ⊗ b_k ⊗ 1^{⊗l}) = 0`.

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::graded::{sv_render, Space, Sv};
use crate::multilinear::{shift_to_bar, unshift_from_bar, MultilinearMap};
use serde::Serialize;

/// A finite-arity strongly homotopy associative structure.
#[derive(Debug, Clone, PartialEq)]
pub struct AInfStructure {
    /// The underlying unshifted graded space (hom spaces flattened).
    pub base: Space,
    /// The shifted space `SA` (degrees lowered by one).
    pub sa: Space,
    /// Arity bound `N`: operations of arity `> N` are zero by definition.
    pub max_arity: usize,
    /// `ops[i-1] = b_i` on the shifted side, degree `+1`.
    ops: Vec<MultilinearMap>,
    /// Optional unit candidates: for each object `A`, a degree-0 element of
    /// `hom(A, A)` in base coordinates.
    pub unit: Option<Vec<Sv>>,
}

impl AInfStructure {
    /// Builds a structure from unshifted operations `m_i` (degree `2-i`);
    /// missing arities are zero. Validates degrees and hom-tag discipline.
    pub fn from_unshifted(
        base: Space,
        max_arity: usize,
        unshifted_ops: &[MultilinearMap],
        unit: Option<Vec<Sv>>,
    ) -> Result<AInfStructure> {
        if max_arity == 0 {
            return Err(Error::invalid("max_arity must be at least 1"));
        }
        if unshifted_ops.len() > max_arity {
            return Err(Error::invalid(format!(
                "{} operations given but max_arity is {max_arity}",
                unshifted_ops.len()
            )));
        }
        let mut shifted = Vec::with_capacity(max_arity);
        for (idx, m) in unshifted_ops.iter().enumerate() {
            let i = idx + 1;
            if m.arity() != i {
                return Err(Error::invalid(format!(
                    "operation {i} has arity {}",
                    m.arity()
                )));
            }
            if m.degree != 2 - i as i64 {
                return Err(Error::invalid(format!(
                    "operation {i} has degree {} (expected {})",
                    m.degree,
                    2 - i as i64
                )));
            }
            if m.sources.iter().any(|s| *s != base) || m.target != base {
                return Err(Error::invalid(format!(
                    "operation {i} is not defined on the given space"
                )));
            }
            shifted.push(shift_to_bar(m));
        }
        let sa = base.suspend(1);
        while shifted.len() < max_arity {
            let i = shifted.len() + 1;
            shifted.push(MultilinearMap::zero(vec![sa.clone(); i], sa.clone(), 1));
        }
        let s = AInfStructure {
            base,
            sa,
            max_arity,
            ops: shifted,
            unit,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds a structure directly from shifted operations `b_i` (degree `+1`).
    pub fn from_shifted(
        base: Space,
        max_arity: usize,
        shifted_ops: Vec<MultilinearMap>,
        unit: Option<Vec<Sv>>,
    ) -> Result<AInfStructure> {
        if max_arity == 0 {
            return Err(Error::invalid("max_arity must be at least 1"));
        }
        if shifted_ops.len() > max_arity {
            return Err(Error::invalid("more operations than max_arity"));
        }
        let sa = base.suspend(1);
        let mut ops = shifted_ops;
        for (idx, b) in ops.iter().enumerate() {
            let i = idx + 1;
            if b.arity() != i || b.degree != 1 {
                return Err(Error::invalid(format!(
                    "shifted operation {i} has arity {} degree {}",
                    b.arity(),
                    b.degree
                )));
            }
            if b.sources.iter().any(|s| *s != sa) || b.target != sa {
                return Err(Error::invalid(format!(
                    "shifted operation {i} not defined on the shift of the given space"
                )));
            }
        }
        while ops.len() < max_arity {
            let i = ops.len() + 1;
            ops.push(MultilinearMap::zero(vec![sa.clone(); i], sa.clone(), 1));
        }
        let s = AInfStructure {
            base,
            sa,
            max_arity,
            ops,
            unit,
        };
        s.validate()?;
        Ok(s)
    }

    /// The shifted operation `b_i` (zero map for `i > max_arity`).
    pub fn b(&self, i: usize) -> MultilinearMap {
        assert!(i >= 1);
        if i <= self.ops.len() {
            self.ops[i - 1].clone()
        } else {
            MultilinearMap::zero(vec![self.sa.clone(); i], self.sa.clone(), 1)
        }
    }

    pub fn b_ref(&self, i: usize) -> Option<&MultilinearMap> {
        self.ops.get(i - 1)
    }

    /// The unshifted operation `m_i` of degree `2-i`.
    pub fn m(&self, i: usize) -> MultilinearMap {
        unshift_from_bar(&self.b(i))
    }

    /// Structure with one operation replaced (shifted side).
    pub fn with_b(&self, i: usize, b: MultilinearMap) -> Result<AInfStructure> {
        if i == 0 || i > self.max_arity {
            return Err(Error::invalid(format!("arity {i} out of range")));
        }
        let mut ops = self.ops.clone();
        ops[i - 1] = b;
        AInfStructure::from_shifted(self.base.clone(), self.max_arity, ops, self.unit.clone())
    }

    /// Largest arity with a nonzero operation (0 if all vanish).
    pub fn top_arity(&self) -> usize {
        (1..=self.ops.len())
            .rev()
            .find(|&i| !self.ops[i - 1].is_zero())
            .unwrap_or(0)
    }

    /// Does the differential vanish (the structure is minimal)?
    pub fn is_minimal(&self) -> bool {
        self.ops[0].is_zero()
    }

    pub fn field(&self) -> FieldSpec {
        self.base.field
    }

    /// Structural validation: degrees, index ranges, hom-tag discipline of
    /// every entry, and unit element shape.
    pub fn validate(&self) -> Result<()> {
        self.base.validate().map_err(Error::Invalid)?;
        for (idx, b) in self.ops.iter().enumerate() {
            let i = idx + 1;
            b.validate()
                .map_err(|e| Error::invalid(format!("operation {i}: {e}")))?;
            for (word, sv) in b.entries() {
                if !self.sa.word_chains(word) {
                    return Err(Error::invalid(format!(
                        "operation {i} has an entry on non-composable word {:?}",
                        self.word_names(word)
                    )));
                }
                let src = self.sa.basis[*word.last().unwrap()].src;
                let tgt = self.sa.basis[word[0]].tgt;
                for (o, _) in sv {
                    let ob = &self.sa.basis[*o];
                    if ob.src != src || ob.tgt != tgt {
                        return Err(Error::invalid(format!(
                            "operation {i} on word {:?} lands outside hom({}, {})",
                            self.word_names(word),
                            self.base.objects[src],
                            self.base.objects[tgt]
                        )));
                    }
                }
            }
        }
        if let Some(units) = &self.unit {
            if units.len() != self.base.objects.len() {
                return Err(Error::invalid("one unit element required per object"));
            }
            for (a, u) in units.iter().enumerate() {
                for (i, _) in u {
                    let be = &self.base.basis[*i];
                    if be.src != a || be.tgt != a {
                        return Err(Error::invalid(format!(
                            "unit of object {} has a component outside hom({0}, {0})",
                            self.base.objects[a]
                        )));
                    }
                    if be.degree != 0 {
                        return Err(Error::invalid(format!(
                            "unit of object {} is not of degree 0",
                            self.base.objects[a]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn word_names(&self, word: &[usize]) -> Vec<String> {
        word.iter()
            .map(|&i| self.base.basis[i].name.clone())
            .collect()
    }

    /// The unit as an arity-0 map into the base (sum over objects), used for
    /// unit insertions.
    pub fn unit_const(&self) -> Result<MultilinearMap> {
        let units = self
            .unit
            .as_ref()
            .ok_or_else(|| Error::invalid("structure has no unit data"))?;
        let mut total: Vec<(usize, crate::field::K)> = Vec::new();
        for u in units {
            total.extend(u.iter().cloned());
        }
        let mut c = MultilinearMap::zero(Vec::new(), self.base.clone(), 0);
        c.set(Vec::new(), total);
        Ok(c)
    }

    /// The Stasheff residual of arity `m` on the shifted side:
    /// `Σ_{j+k+l=m} b_{j+1+l} ∘ (1^{⊗j} ⊗ b_k ⊗ 1^{⊗l})`.
    pub fn stasheff_residual(&self, m: usize) -> MultilinearMap {
        let mut res = MultilinearMap::zero(vec![self.sa.clone(); m], self.sa.clone(), 2);
        for k in 1..=m.min(self.max_arity) {
            let outer_arity = m - k + 1;
            if outer_arity > self.max_arity {
                continue;
            }
            let inner = self.b(k);
            if inner.is_zero() {
                continue;
            }
            let outer = self.b(outer_arity);
            if outer.is_zero() {
                continue;
            }
            for j in 0..=(m - k) {
                res = res.add(&outer.insert(&inner, j));
            }
        }
        res
    }

    /// Checks the Stasheff identities for arities `1..=max_arity`.
    pub fn check_stasheff(&self) -> StasheffReport {
        self.check_stasheff_up_to(self.max_arity)
    }

    /// Checks the Stasheff identities for arities `1..=limit`. With top
    /// nonzero arity `K`, residuals vanish identically for `m > 2K - 1`, so
    /// `limit = 2K - 1` certifies the identities at *every* arity.
    pub fn check_stasheff_up_to(&self, limit: usize) -> StasheffReport {
        let mut residuals = Vec::new();
        let mut pass = true;
        for m in 1..=limit {
            let res = self.stasheff_residual(m);
            let witness = res.first_entry().map(|(w, sv)| Witness {
                word: self.word_names(w),
                value: sv_render(sv, &self.sa),
            });
            if witness.is_some() {
                pass = false;
            }
            residuals.push(ArityCheck {
                arity: m,
                ok: witness.is_none(),
                witness,
            });
        }
        StasheffReport {
            max_arity_checked: limit,
            pass,
            residuals,
        }
    }

    /// Builds the structure generated by a differential graded algebra:
    /// verifies `d² = 0`, the Leibniz rule and associativity on all basis
    /// words (with a witness on failure), then installs `m_1 = d`,
    /// `m_2 = mul` and zero higher operations.
    pub fn from_dg_algebra(
        base: Space,
        d: &MultilinearMap,
        mul: &MultilinearMap,
        max_arity: usize,
        unit: Option<Vec<Sv>>,
    ) -> Result<AInfStructure> {
        if d.arity() != 1 || d.degree != 1 {
            return Err(Error::invalid("d must have arity 1 and degree +1"));
        }
        if mul.arity() != 2 || mul.degree != 0 {
            return Err(Error::invalid("mul must have arity 2 and degree 0"));
        }
        if max_arity < 2 {
            return Err(Error::invalid("max_arity must be at least 2"));
        }
        let dd = d.compose1(d);
        if let Some((w, sv)) = dd.first_entry() {
            return Err(Error::check(
                "d² = 0",
                format!(
                    "d²({}) = {}",
                    base.basis[w[0]].name,
                    sv_render(sv, &base)
                ),
            ));
        }
        // Leibniz: d ∘ mul = mul ∘ (d ⊗ 1) + mul ∘ (1 ⊗ d); the Koszul sign
        // (-1)^{|x|} in the second summand is produced by the engine.
        let leibniz = d
            .insert(mul, 0)
            .sub(&mul.insert(d, 0))
            .sub(&mul.insert(d, 1));
        if let Some((w, sv)) = leibniz.first_entry() {
            return Err(Error::check(
                "Leibniz rule",
                format!(
                    "on {:?}: {}",
                    w.iter().map(|&i| base.basis[i].name.clone()).collect::<Vec<_>>(),
                    sv_render(sv, &base)
                ),
            ));
        }
        let assoc = mul.insert(mul, 0).sub(&mul.insert(mul, 1));
        if let Some((w, sv)) = assoc.first_entry() {
            return Err(Error::check(
                "associativity",
                format!(
                    "on {:?}: {}",
                    w.iter().map(|&i| base.basis[i].name.clone()).collect::<Vec<_>>(),
                    sv_render(sv, &base)
                ),
            ));
        }
        AInfStructure::from_unshifted(base, max_arity, &[d.clone(), mul.clone()], unit)
    }

    /// Checks strict and homological unitality. Requires unit data.
    pub fn check_units(&self) -> Result<UnitReport> {
        let eta = self.unit_const()?;
        let id = MultilinearMap::identity(&self.base);

        // Strict unitality, operation by operation (unshifted side: the
        // conditions are stated there; insertions carry no sign since the
        // unit has degree 0).
        let mut strict = true;
        let mut strict_witness = None;
        'outer: for i in 1..=self.max_arity {
            let m_i = self.m(i);
            if m_i.is_zero() && i != 2 {
                continue;
            }
            for j in 0..i {
                let ins = m_i.insert(&eta, j);
                let expect_identity = i == 2;
                let defect = if expect_identity { ins.sub(&id) } else { ins };
                if let Some((w, sv)) = defect.first_entry() {
                    strict = false;
                    strict_witness = Some(Witness {
                        word: {
                            let mut names: Vec<String> =
                                w.iter().map(|&x| self.base.basis[x].name.clone()).collect();
                            names.insert(j, "η".to_string());
                            names
                        },
                        value: sv_render(sv, &self.base),
                    });
                    break 'outer;
                }
            }
        }

        // Homological unitality: η is a cycle and [η] acts as the identity
        // on cohomology classes on both sides.
        let m1 = self.m(1);
        let m2 = self.m(2);
        let mut homological = true;
        let mut homological_witness = None;
        let d_eta = m1.compose1(&eta);
        if let Some((_, sv)) = d_eta.first_entry() {
            homological = false;
            homological_witness = Some(Witness {
                word: vec!["η".to_string()],
                value: sv_render(sv, &self.base),
            });
        } else {
            let coh = crate::morphism::cohomology(self);
            'h: for block in &coh.blocks {
                for k in 0..block.sub.dim() {
                    let x = block.sub.representative(k);
                    let left = m2.eval_tensor(&[&eta.eval_word(&[]), &x]);
                    let right = m2.eval_tensor(&[&x, &eta.eval_word(&[])]);
                    for (name, prod) in [("η·x", &left), ("x·η", &right)] {
                        let class = block.sub.reduce(prod);
                        let expect: Sv = vec![(k, self.field().one())];
                        let ok = match class {
                            Some(c) => c == expect,
                            None => false,
                        };
                        if !ok {
                            homological = false;
                            homological_witness = Some(Witness {
                                word: vec![format!(
                                    "{name} for class {} of degree {} in hom({}, {})",
                                    k,
                                    block.degree,
                                    self.base.objects[block.src],
                                    self.base.objects[block.tgt]
                                )],
                                value: sv_render(prod, &self.base),
                            });
                            break 'h;
                        }
                    }
                }
            }
        }

        Ok(UnitReport {
            strict,
            strict_witness,
            homological,
            homological_witness,
        })
    }

    /// Conjugates the structure by an invertible degree-0 family:
    /// `b' = F ∘ b ∘ F^{-1}` computed through cogenerator components on the
    /// truncated bar. Everything is exact at the arity bound: `b'_m` for
    /// `m ≤ max_arity` depends only on `b_k, F_k` with `k ≤ m`, the result
    /// satisfies the Stasheff identities up to `max_arity`, and `F` is a
    /// morphism `(A, b) → (A, b')` up to that bound.
    pub fn gauge_transform(&self, f: &[MultilinearMap]) -> Result<AInfStructure> {
        let fam = crate::morphism::Family::new(self.sa.clone(), self.sa.clone(), f.to_vec(), 0)?;
        if !fam.is_invertible() {
            return Err(Error::invalid("gauge family has non-invertible linear part"));
        }
        let inv = fam.inverse(self.max_arity);
        // C_r := (F ∘ b)_r, then b'_m = Σ C_r ∘ (F^{-1} blocks).
        let b_fam: Vec<MultilinearMap> = (1..=self.max_arity).map(|i| self.b(i)).collect();
        let c = crate::morphism::family_after_coderivation(&fam.comps(self.max_arity), &b_fam);
        let bp = crate::morphism::compose_components(&c, &inv.comps(self.max_arity), self.max_arity);
        AInfStructure::from_shifted(self.base.clone(), self.max_arity, bp, self.unit.clone())
    }

    /// Splits a strictly unital structure whose units are single basis
    /// vectors into its augmentation ideal (the span of the non-unit basis
    /// vectors) plus units, verifying that the ideal is closed under all
    /// operations. Returns the reduced structure and the data needed to
    /// restore the original exactly.
    pub fn augment_reduce(&self) -> Result<(AInfStructure, Augmentation)> {
        let units = self
            .unit
            .as_ref()
            .ok_or_else(|| Error::invalid("augmentation requires unit data"))?;
        let report = self.check_units()?;
        if !report.strict {
            return Err(Error::check(
                "strict unitality (augmentation precondition)",
                report
                    .strict_witness
                    .map(|w| format!("{:?} -> {}", w.word, w.value))
                    .unwrap_or_default(),
            ));
        }
        let mut unit_indices = Vec::with_capacity(units.len());
        for (a, u) in units.iter().enumerate() {
            if u.len() != 1 || !u[0].1.is_one() {
                return Err(Error::Unsupported(format!(
                    "unit of object {} is not a single basis vector",
                    self.base.objects[a]
                )));
            }
            unit_indices.push(u[0].0);
        }
        // Reduced space: all non-unit basis vectors, in order.
        let keep: Vec<usize> = (0..self.base.dim())
            .filter(|i| !unit_indices.contains(i))
            .collect();
        let reduced_base = Space {
            field: self.base.field,
            objects: self.base.objects.clone(),
            basis: keep.iter().map(|&i| self.base.basis[i].clone()).collect(),
        };
        let old_to_new: std::collections::BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();

        // Restrict each unshifted operation to the ideal and check closure.
        let mut reduced_ops = Vec::new();
        for i in 1..=self.max_arity {
            let m_i = self.m(i);
            let mut r = MultilinearMap::zero(
                vec![reduced_base.clone(); i],
                reduced_base.clone(),
                2 - i as i64,
            );
            for (word, sv) in m_i.entries() {
                if word.iter().any(|x| unit_indices.contains(x)) {
                    continue;
                }
                let new_word: Vec<usize> = word.iter().map(|x| old_to_new[x]).collect();
                let mut out = Vec::with_capacity(sv.len());
                for (o, c) in sv {
                    match old_to_new.get(o) {
                        Some(&n) => out.push((n, c.clone())),
                        None => {
                            return Err(Error::check(
                                "augmentation ideal closure",
                                format!(
                                    "m_{i}{:?} has a unit component: {}",
                                    self.word_names(word),
                                    sv_render(sv, &self.base)
                                ),
                            ))
                        }
                    }
                }
                r.set(new_word, out);
            }
            reduced_ops.push(r);
        }
        let reduced = AInfStructure::from_unshifted(
            reduced_base,
            self.max_arity,
            &reduced_ops,
            None,
        )?;
        let aug = Augmentation {
            unit_indices,
            original_base: self.base.clone(),
        };
        Ok((reduced, aug))
    }

    /// Rebuilds a strictly unital structure from its augmentation ideal:
    /// exact inverse of [`AInfStructure::augment_reduce`].
    pub fn augment_restore(reduced: &AInfStructure, aug: &Augmentation) -> Result<AInfStructure> {
        let base = aug.original_base.clone();
        let keep: Vec<usize> = (0..base.dim())
            .filter(|i| !aug.unit_indices.contains(i))
            .collect();
        if keep.len() != reduced.base.dim() {
            return Err(Error::invalid("augmentation data does not match the reduced structure"));
        }
        let new_to_old = keep;
        let mut ops = Vec::new();
        for i in 1..=reduced.max_arity {
            let r = reduced.m(i);
            let mut m_i = MultilinearMap::zero(vec![base.clone(); i], base.clone(), 2 - i as i64);
            for (word, sv) in r.entries() {
                let old_word: Vec<usize> = word.iter().map(|&x| new_to_old[x]).collect();
                m_i.set(
                    old_word,
                    sv.iter().map(|(o, c)| (new_to_old[*o], c.clone())).collect(),
                );
            }
            // Strict-unit extension for m_2: η is a two-sided identity.
            if i == 2 {
                for &u in &aug.unit_indices {
                    let a_src = base.basis[u].src;
                    for x in 0..base.dim() {
                        // m_2(η_A ⊗ x) = x whenever tgt(x) = A.
                        if base.basis[x].tgt == a_src {
                            m_i.add_to(vec![u, x], vec![(x, base.field.one())]);
                        }
                        // m_2(x ⊗ η_A) = x whenever src(x) = A, except the
                        // pair (η, η) which was already counted once.
                        if base.basis[x].src == a_src && x != u {
                            m_i.add_to(vec![x, u], vec![(x, base.field.one())]);
                        }
                    }
                }
            }
            ops.push(m_i);
        }
        let units = (0..base.objects.len())
            .map(|a| {
                let u = aug
                    .unit_indices
                    .iter()
                    .find(|&&i| base.basis[i].src == a && base.basis[i].tgt == a)
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("no unit index for object {a}")))?;
                Ok(vec![(u, base.field.one())])
            })
            .collect::<Result<Vec<Sv>>>()?;
        AInfStructure::from_unshifted(base, reduced.max_arity, &ops, Some(units))
    }
}

/// Data recording how a strictly unital structure was split.
#[derive(Debug, Clone)]
pub struct Augmentation {
    /// Basis indices of the unit vectors, one per object, in the original space.
    pub unit_indices: Vec<usize>,
    pub original_base: Space,
}

/// A failing word and the nonzero value observed on it.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Witness {
    pub word: Vec<String>,
    pub value: String,
}

/// Per-arity outcome of an identity check.
#[derive(Debug, Clone, Serialize)]
pub struct ArityCheck {
    pub arity: usize,
    pub ok: bool,
    pub witness: Option<Witness>,
}

/// Outcome of the Stasheff identity check.
#[derive(Debug, Clone, Serialize)]
pub struct StasheffReport {
    pub max_arity_checked: usize,
    pub pass: bool,
    pub residuals: Vec<ArityCheck>,
}

impl StasheffReport {
    pub fn first_failure(&self) -> Option<&ArityCheck> {
        self.residuals.iter().find(|r| !r.ok)
    }
}

/// Outcome of the unit checks.
#[derive(Debug, Clone, Serialize)]
pub struct UnitReport {
    pub strict: bool,
    pub strict_witness: Option<Witness>,
    pub homological: bool,
    pub homological_witness: Option<Witness>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    // k[e]/(e²) with e in degree 1, zero differential, strictly unital.
    fn dual_numbers() -> AInfStructure {
        let base = Space::simple(q(), &[("1", 0), ("e", 1)]);
        let d = MultilinearMap::zero(vec![base.clone()], base.clone(), 1);
        let mut mul = MultilinearMap::zero(vec![base.clone(); 2], base.clone(), 0);
        mul.set(vec![0, 0], vec![(0, q().one())]);
        mul.set(vec![0, 1], vec![(1, q().one())]);
        mul.set(vec![1, 0], vec![(1, q().one())]);
        AInfStructure::from_dg_algebra(base, &d, &mul, 3, Some(vec![vec![(0, q().one())]]))
            .unwrap()
    }

    // Minimal structure with one ternary operation: m_3(x,x,x) = z.
    fn ternary_only() -> AInfStructure {
        let base = Space::simple(q(), &[("x", 1), ("z", 2)]);
        let mut m3 = MultilinearMap::zero(vec![base.clone(); 3], base.clone(), -1);
        m3.set(vec![0, 0, 0], vec![(1, q().one())]);
        let zero1 = MultilinearMap::zero(vec![base.clone()], base.clone(), 1);
        let zero2 = MultilinearMap::zero(vec![base.clone(); 2], base.clone(), 0);
        AInfStructure::from_unshifted(base, 4, &[zero1, zero2, m3], None).unwrap()
    }

    #[test]
    fn dg_import_and_stasheff() {
        let a = dual_numbers();
        assert!(a.check_stasheff().pass);
        // Top nonzero arity 2: checking to 3 certifies every arity.
        assert!(a.check_stasheff_up_to(2 * a.top_arity() - 1).pass);
        assert!(a.is_minimal());
    }

    #[test]
    fn dg_import_rejects_broken_leibniz() {
        let base = Space::simple(q(), &[("a", 0), ("b", 1)]);
        let mut d = MultilinearMap::zero(vec![base.clone()], base.clone(), 1);
        d.set(vec![0], vec![(1, q().one())]);
        let mut mul = MultilinearMap::zero(vec![base.clone(); 2], base.clone(), 0);
        mul.set(vec![0, 0], vec![(0, q().one())]);
        let err = AInfStructure::from_dg_algebra(base, &d, &mul, 2, None).unwrap_err();
        match err {
            Error::CheckFailed { check, .. } => assert_eq!(check, "Leibniz rule"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn stasheff_failure_has_witness() {
        // Break associativity: 1·e = 2e while e·1 = e.
        let base = Space::simple(q(), &[("1", 0), ("e", 1)]);
        let zero1 = MultilinearMap::zero(vec![base.clone()], base.clone(), 1);
        let mut mul = MultilinearMap::zero(vec![base.clone(); 2], base.clone(), 0);
        mul.set(vec![0, 0], vec![(0, q().one())]);
        mul.set(vec![0, 1], vec![(1, q().from_i64(2))]);
        mul.set(vec![1, 0], vec![(1, q().one())]);
        let a = AInfStructure::from_unshifted(base, 2, &[zero1, mul], None).unwrap();
        let report = a.check_stasheff_up_to(3);
        assert!(!report.pass);
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.arity, 3);
        let w = fail.witness.as_ref().unwrap();
        assert_eq!(w.word, vec!["1", "1", "e"]);
    }

    #[test]
    fn ternary_structure_is_consistent() {
        let a = ternary_only();
        assert!(a.is_minimal());
        assert_eq!(a.top_arity(), 3);
        // 2K - 1 = 5 certifies all arities.
        assert!(a.check_stasheff_up_to(5).pass);
        assert!(!a.b(3).is_zero());
        assert_eq!(a.b(3).degree, 1);
    }

    #[test]
    fn unit_checks() {
        let a = dual_numbers();
        let rep = a.check_units().unwrap();
        assert!(rep.strict, "{:?}", rep.strict_witness);
        assert!(rep.homological, "{:?}", rep.homological_witness);

        // A wrong unit candidate (2·1) fails both ways with witnesses.
        let mut bad = a.clone();
        bad.unit = Some(vec![vec![(0, q().from_i64(2))]]);
        let rep = bad.check_units().unwrap();
        assert!(!rep.strict);
        assert!(rep.strict_witness.is_some());
        assert!(!rep.homological);
    }

    #[test]
    fn gauge_transform_round_trip() {
        let a = ternary_only();
        // F = (1, F_2) with F_2(sx, sx) = sx (degree 0 on the shifted side).
        let f1 = MultilinearMap::identity(&a.sa);
        let mut f2 = MultilinearMap::zero(vec![a.sa.clone(); 2], a.sa.clone(), 0);
        f2.set(vec![0, 0], vec![(0, q().one())]);
        let f = vec![f1, f2];
        let b = a.gauge_transform(&f).unwrap();
        assert!(b.check_stasheff_up_to(2 * a.max_arity - 1).pass);
        assert_ne!(a.b(4), b.b(4));

        // Conjugating back by the inverse family restores the structure.
        let fam =
            crate::morphism::Family::new(a.sa.clone(), a.sa.clone(), f.clone(), 0).unwrap();
        let inv = fam.inverse(a.max_arity);
        let back = b.gauge_transform(&inv.comps(a.max_arity)).unwrap();
        assert_eq!(back, a);

        // The gauge family is a morphism (A, b) → (A, b').
        let m = crate::morphism::AInfMorphism::new(a.clone(), b, f, None).unwrap();
        let rep = m.check_morphism();
        assert!(rep.pass, "{:?}", rep.first_failure());
    }

    #[test]
    fn augmentation_round_trip() {
        let a = dual_numbers();
        let (reduced, aug) = a.augment_reduce().unwrap();
        assert_eq!(reduced.base.dim(), 1);
        assert!(reduced.m(2).is_zero());
        let restored = AInfStructure::augment_restore(&reduced, &aug).unwrap();
        assert_eq!(restored, a);
    }
}
