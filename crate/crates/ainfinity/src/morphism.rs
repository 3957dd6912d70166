//! Morphisms of strongly homotopy associative structures, homotopies between
//! them, composition, inversion, cohomology and quasi-isomorphism tests.
//!
//! A morphism is stored by its shifted components `F_i : (SA)^{⊗i} → SB` of
//! degree 0; the defining identity on the shifted side is the sign-free
//! `F ∘ b = b' ∘ F` after projection to cogenerators:
//! `Σ F_{j+1+l} ∘ (1^{⊗j} ⊗ b_k ⊗ 1^{⊗l}) = Σ b'_r ∘ (F_{i_1} ⊗ … ⊗ F_{i_r})`.

use crate::ainf::{AInfStructure, ArityCheck, Witness};
use crate::error::{Error, Result};
use crate::graded::{sv_render, Space, Sv};
use crate::linalg::{self, Mat, Subquotient};
use crate::multilinear::{shift_to_bar, unshift_from_bar, MultilinearMap};
use serde::Serialize;
use std::collections::BTreeMap;

/// A family of homogeneous components `(dom)^{⊗i} → cod`, `i = 1, 2, …`,
/// all of one degree (0 for morphism families, -1 for homotopy families).
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub dom: Space,
    pub cod: Space,
    pub degree: i64,
    comps: Vec<MultilinearMap>,
}

impl Family {
    pub fn new(
        dom: Space,
        cod: Space,
        mut comps: Vec<MultilinearMap>,
        degree: i64,
    ) -> Result<Family> {
        // Canonical representation: no trailing zero components, so families
        // that agree as maps compare equal.
        while comps.last().is_some_and(|c| c.is_zero()) {
            comps.pop();
        }
        for (idx, c) in comps.iter().enumerate() {
            let i = idx + 1;
            if c.arity() != i {
                return Err(Error::invalid(format!("component {i} has arity {}", c.arity())));
            }
            if c.degree != degree {
                return Err(Error::invalid(format!(
                    "component {i} has degree {} (family degree {degree})",
                    c.degree
                )));
            }
            if c.sources.iter().any(|s| *s != dom) || c.target != cod {
                return Err(Error::invalid(format!(
                    "component {i} is not a map (dom)^{i} -> cod"
                )));
            }
            c.validate().map_err(Error::Invalid)?;
        }
        Ok(Family {
            dom,
            cod,
            degree,
            comps,
        })
    }

    pub fn identity(space: &Space) -> Family {
        Family {
            dom: space.clone(),
            cod: space.clone(),
            degree: 0,
            comps: vec![MultilinearMap::identity(space)],
        }
    }

    /// Component of arity `i` (zero beyond the stored length).
    pub fn comp(&self, i: usize) -> MultilinearMap {
        assert!(i >= 1);
        if i <= self.comps.len() {
            self.comps[i - 1].clone()
        } else {
            MultilinearMap::zero(vec![self.dom.clone(); i], self.cod.clone(), self.degree)
        }
    }

    /// Components `1..=n` as a padded vector.
    pub fn comps(&self, n: usize) -> Vec<MultilinearMap> {
        (1..=n).map(|i| self.comp(i)).collect()
    }

    pub fn stored_len(&self) -> usize {
        self.comps.len()
    }

    /// Is the linear part invertible?
    pub fn is_invertible(&self) -> bool {
        if self.degree != 0 || self.dom.dim() != self.cod.dim() {
            return false;
        }
        linalg::invertible(&map1_to_mat(&self.comp(1)))
    }

    /// Inverse family up to arity `n` (linear part must be invertible):
    /// `G_1 = F_1^{-1}`, `G_n = -G_1 ∘ Σ_{r≥2} F_r ∘ (G-blocks of total n)`.
    pub fn inverse(&self, n: usize) -> Family {
        assert_eq!(self.degree, 0);
        let g1 = mat_to_map1(
            &linalg::inverse(&map1_to_mat(&self.comp(1))),
            &self.cod,
            &self.dom,
            0,
        );
        let mut g: Vec<MultilinearMap> = vec![g1.clone()];
        for m in 2..=n {
            let mut acc = MultilinearMap::zero(vec![self.cod.clone(); m], self.dom.clone(), 0);
            for r in 2..=m {
                let fr = self.comp(r);
                if fr.is_zero() {
                    continue;
                }
                for parts in compositions(m, r) {
                    let blocks: Vec<&MultilinearMap> = parts.iter().map(|&p| &g[p - 1]).collect();
                    acc = acc.add(&fr.compose_blocks(&blocks));
                }
            }
            g.push(g1.compose1(&acc).neg());
        }
        Family {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            degree: 0,
            comps: g,
        }
    }
}

/// All ordered compositions of `m` into exactly `r` positive parts.
pub fn compositions(m: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if r == 1 {
            if m >= 1 {
                cur.push(m);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for first in 1..=(m + 1).saturating_sub(r) {
            cur.push(first);
            rec(m - first, r - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r >= 1 && m >= r {
        rec(m, r, &mut Vec::new(), &mut out);
    }
    out
}

/// Cogenerator components of `F ∘ G` for two component families
/// (`(F∘G)_m = Σ_r Σ_{i_1+…+i_r=m} F_r ∘ (G_{i_1} ⊗ … ⊗ G_{i_r})`).
/// Also computes `(b ∘ F)_m` when the outer family is a structure family.
pub fn compose_components(
    f: &[MultilinearMap],
    g: &[MultilinearMap],
    n: usize,
) -> Vec<MultilinearMap> {
    assert!(!f.is_empty() && !g.is_empty());
    // With inner blocks of nonzero degree the composite degree would vary
    // with the number of blocks; only degree-0 inner families occur here.
    assert_eq!(g[0].degree, 0, "inner family must have degree 0");
    let dom = g[0].sources[0].clone();
    let cod = f[0].target.clone();
    let deg = f[0].degree + g[0].degree;
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let mut acc = MultilinearMap::zero(vec![dom.clone(); m], cod.clone(), deg);
        for r in 1..=m.min(f.len()) {
            if f[r - 1].is_zero() {
                continue;
            }
            for parts in compositions(m, r) {
                if parts.iter().any(|&p| p > g.len()) {
                    continue;
                }
                let blocks: Vec<&MultilinearMap> = parts.iter().map(|&p| &g[p - 1]).collect();
                if blocks.iter().any(|b| b.is_zero()) {
                    continue;
                }
                acc = acc.add(&f[r - 1].compose_blocks(&blocks));
            }
        }
        out.push(acc);
    }
    out
}

/// Cogenerator components of `F ∘ cod(b)` (a family composed with the
/// coderivation generated by the structure family `b`):
/// `(F∘b)_m = Σ_{j+k+l=m} F_{j+1+l} ∘ (1^{⊗j} ⊗ b_k ⊗ 1^{⊗l})`.
pub fn family_after_coderivation(
    f: &[MultilinearMap],
    b: &[MultilinearMap],
) -> Vec<MultilinearMap> {
    assert!(!f.is_empty() && !b.is_empty());
    let n = f.len();
    let dom = f[0].sources[0].clone();
    let cod = f[0].target.clone();
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let mut acc = MultilinearMap::zero(
            vec![dom.clone(); m],
            cod.clone(),
            f[0].degree + b[0].degree,
        );
        for k in 1..=m.min(b.len()) {
            let inner = &b[k - 1];
            if inner.is_zero() {
                continue;
            }
            let outer_arity = m - k + 1;
            if outer_arity > f.len() || f[outer_arity - 1].is_zero() {
                continue;
            }
            for j in 0..=(m - k) {
                acc = acc.add(&f[outer_arity - 1].insert(inner, j));
            }
        }
        out.push(acc);
    }
    out
}

/// Cogenerator components of `b' ∘ cod_{F,G}(H)` where `cod_{F,G}(H)` is the
/// `(F, G)`-coderivation generated by the family `H`:
/// `Σ_r Σ b'_r ∘ (F_{i_1} ⊗ … ⊗ F_{i_u} ⊗ H_k ⊗ G_{j_1} ⊗ … ⊗ G_{j_t})`.
pub fn structure_after_mixed_coderivation(
    bp: &[MultilinearMap],
    f: &[MultilinearMap],
    h: &[MultilinearMap],
    g: &[MultilinearMap],
    n: usize,
) -> Vec<MultilinearMap> {
    let dom = h[0].sources[0].clone();
    let cod = bp[0].target.clone();
    let deg = bp[0].degree + h[0].degree;
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let mut acc = MultilinearMap::zero(vec![dom.clone(); m], cod.clone(), deg);
        for r in 1..=m.min(bp.len()) {
            if bp[r - 1].is_zero() {
                continue;
            }
            for parts in compositions(m, r) {
                // Choose which slot carries the H component.
                for slot in 0..r {
                    let mut blocks: Vec<&MultilinearMap> = Vec::with_capacity(r);
                    let mut ok = true;
                    for (t, &p) in parts.iter().enumerate() {
                        let fam: &[MultilinearMap] = if t < slot {
                            f
                        } else if t == slot {
                            h
                        } else {
                            g
                        };
                        if p > fam.len() || fam[p - 1].is_zero() {
                            ok = false;
                            break;
                        }
                        blocks.push(&fam[p - 1]);
                    }
                    if ok {
                        acc = acc.add(&bp[r - 1].compose_blocks(&blocks));
                    }
                }
            }
        }
        out.push(acc);
    }
    out
}

/// A morphism of strongly homotopy associative structures.
#[derive(Debug, Clone, PartialEq)]
pub struct AInfMorphism {
    pub dom: AInfStructure,
    pub cod: AInfStructure,
    /// Object map (identity unless the structures have different objects).
    pub obj_map: Vec<usize>,
    fam: Family,
}

impl AInfMorphism {
    /// From shifted components `F_i : (S dom)^{⊗i} → S cod` of degree 0.
    pub fn new(
        dom: AInfStructure,
        cod: AInfStructure,
        comps: Vec<MultilinearMap>,
        obj_map: Option<Vec<usize>>,
    ) -> Result<AInfMorphism> {
        let obj_map = obj_map.unwrap_or_else(|| (0..dom.base.objects.len()).collect());
        if obj_map.len() != dom.base.objects.len()
            || obj_map.iter().any(|&o| o >= cod.base.objects.len())
        {
            return Err(Error::invalid("object map has wrong shape"));
        }
        let fam = Family::new(dom.sa.clone(), cod.sa.clone(), comps, 0)?;
        let m = AInfMorphism {
            dom,
            cod,
            obj_map,
            fam,
        };
        m.validate_tags()?;
        Ok(m)
    }

    /// From unshifted components `f_i` of degree `1-i`.
    pub fn from_unshifted(
        dom: AInfStructure,
        cod: AInfStructure,
        comps: &[MultilinearMap],
        obj_map: Option<Vec<usize>>,
    ) -> Result<AInfMorphism> {
        for (idx, c) in comps.iter().enumerate() {
            let i = idx + 1;
            if c.degree != 1 - i as i64 {
                return Err(Error::invalid(format!(
                    "unshifted component {i} has degree {} (expected {})",
                    c.degree,
                    1 - i as i64
                )));
            }
        }
        AInfMorphism::new(
            dom,
            cod,
            comps.iter().map(shift_to_bar).collect(),
            obj_map,
        )
    }

    fn validate_tags(&self) -> Result<()> {
        for i in 1..=self.fam.stored_len() {
            let c = self.fam.comp(i);
            for (word, sv) in c.entries() {
                if !self.dom.sa.word_chains(word) {
                    return Err(Error::invalid(format!(
                        "component {i} has an entry on non-composable word {:?}",
                        self.dom.word_names(word)
                    )));
                }
                let src = self.obj_map[self.dom.sa.basis[*word.last().unwrap()].src];
                let tgt = self.obj_map[self.dom.sa.basis[word[0]].tgt];
                for (o, _) in sv {
                    let ob = &self.cod.sa.basis[*o];
                    if ob.src != src || ob.tgt != tgt {
                        return Err(Error::invalid(format!(
                            "component {i} on word {:?} lands outside the mapped hom pair",
                            self.dom.word_names(word)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: &AInfStructure) -> AInfMorphism {
        AInfMorphism {
            dom: a.clone(),
            cod: a.clone(),
            obj_map: (0..a.base.objects.len()).collect(),
            fam: Family::identity(&a.sa),
        }
    }

    /// Shifted component `F_i` (zero beyond stored data).
    pub fn f(&self, i: usize) -> MultilinearMap {
        self.fam.comp(i)
    }

    pub fn comps(&self, n: usize) -> Vec<MultilinearMap> {
        self.fam.comps(n)
    }

    /// Unshifted component `f_i` of degree `1-i`.
    pub fn f_unshifted(&self, i: usize) -> MultilinearMap {
        unshift_from_bar(&self.f(i))
    }

    pub fn max_arity(&self) -> usize {
        self.dom.max_arity.max(self.cod.max_arity)
    }

    /// The morphism identity `F ∘ b = b' ∘ F`, arity by arity.
    pub fn check_morphism(&self) -> MorphismReport {
        let n = self.max_arity();
        let b: Vec<MultilinearMap> = (1..=n).map(|i| self.dom.b(i)).collect();
        let bp: Vec<MultilinearMap> = (1..=n).map(|i| self.cod.b(i)).collect();
        let fcomps = self.comps(n);
        let lhs = family_after_coderivation(&fcomps, &b);
        let rhs = compose_components(&bp, &fcomps, n);
        let mut residuals = Vec::new();
        let mut pass = true;
        for m in 1..=n {
            let res = lhs[m - 1].sub(&rhs[m - 1]);
            let witness = res.first_entry().map(|(w, sv)| Witness {
                word: self.dom.word_names(w),
                value: sv_render(sv, &self.cod.sa),
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
        MorphismReport {
            max_arity_checked: n,
            pass,
            residuals,
        }
    }

    /// Composition `self ∘ g` (so `g` is applied first).
    pub fn compose(&self, g: &AInfMorphism) -> Result<AInfMorphism> {
        if g.cod != self.dom {
            return Err(Error::invalid("composition: codomain/domain mismatch"));
        }
        let n = self.max_arity().max(g.max_arity());
        let comps = compose_components(&self.comps(n), &g.comps(n), n);
        let obj_map = g.obj_map.iter().map(|&o| self.obj_map[o]).collect();
        AInfMorphism::new(g.dom.clone(), self.cod.clone(), comps, Some(obj_map))
    }

    /// Strict inverse (exists iff the linear part is invertible); the
    /// composite either way is the identity morphism on the nose.
    pub fn inverse(&self) -> Result<AInfMorphism> {
        if !self.fam.is_invertible() {
            return Err(Error::invalid("linear part is not invertible"));
        }
        let mut inv_obj = vec![usize::MAX; self.cod.base.objects.len()];
        for (a, &fa) in self.obj_map.iter().enumerate() {
            if inv_obj[fa] != usize::MAX {
                return Err(Error::invalid("object map is not injective"));
            }
            inv_obj[fa] = a;
        }
        if inv_obj.iter().any(|&o| o == usize::MAX) {
            return Err(Error::invalid("object map is not surjective"));
        }
        let n = self.max_arity();
        let g = self.fam.inverse(n);
        AInfMorphism::new(
            self.cod.clone(),
            self.dom.clone(),
            g.comps(n),
            Some(inv_obj),
        )
    }

    /// Is the morphism strictly unital: `f_1(η_A) = η'_{ḟA}` per object and
    /// every component of arity ≥ 2 vanishes on words containing a unit?
    pub fn check_unital(&self) -> Result<UnitalMorphismReport> {
        let eta = self.dom.unit_const()?;
        let dom_units = self
            .dom
            .unit
            .as_ref()
            .ok_or_else(|| Error::invalid("domain has no unit data"))?;
        let cod_units = self
            .cod
            .unit
            .as_ref()
            .ok_or_else(|| Error::invalid("codomain has no unit data"))?;
        let f1 = self.f_unshifted(1);
        let mut pass = true;
        let mut witness = None;
        for (a_obj, u) in dom_units.iter().enumerate() {
            if u.is_empty() {
                continue;
            }
            let mapped = f1.eval_tensor(&[u]);
            let diff = crate::graded::sv_sub(&mapped, &cod_units[self.obj_map[a_obj]]);
            if !diff.is_empty() {
                pass = false;
                witness = Some(Witness {
                    word: vec![format!("f_1(η_{})", self.dom.base.objects[a_obj])],
                    value: sv_render(&diff, &self.cod.base),
                });
                break;
            }
        }
        if pass {
            'outer: for i in 2..=self.fam.stored_len() {
                let fi = self.f_unshifted(i);
                if fi.is_zero() {
                    continue;
                }
                for j in 0..i {
                    let ins = fi.insert(&eta, j);
                    if let Some((w, sv)) = ins.first_entry() {
                        pass = false;
                        let mut names: Vec<String> = w
                            .iter()
                            .map(|&x| self.dom.base.basis[x].name.clone())
                            .collect();
                        names.insert(j, "η".to_string());
                        witness = Some(Witness {
                            word: names,
                            value: sv_render(sv, &self.cod.base),
                        });
                        break 'outer;
                    }
                }
            }
        }
        Ok(UnitalMorphismReport { pass, witness })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MorphismReport {
    pub max_arity_checked: usize,
    pub pass: bool,
    pub residuals: Vec<ArityCheck>,
}

impl MorphismReport {
    pub fn first_failure(&self) -> Option<&ArityCheck> {
        self.residuals.iter().find(|r| !r.ok)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitalMorphismReport {
    pub pass: bool,
    pub witness: Option<Witness>,
}

/// A homotopy between two morphisms `f, g : A → B`: components
/// `H_i : (SA)^{⊗i} → SB` of degree `-1`, asserting
/// `F - G = b' ∘ cod_{F,G}(H) + cod_{F,G}(H) ∘ b` on cogenerator components.
#[derive(Debug, Clone)]
pub struct Homotopy {
    pub f: AInfMorphism,
    pub g: AInfMorphism,
    fam: Family,
}

impl Homotopy {
    pub fn new(f: AInfMorphism, g: AInfMorphism, comps: Vec<MultilinearMap>) -> Result<Homotopy> {
        if f.dom != g.dom || f.cod != g.cod {
            return Err(Error::invalid("homotopy endpoints have different (co)domains"));
        }
        let fam = Family::new(f.dom.sa.clone(), f.cod.sa.clone(), comps, -1)?;
        Ok(Homotopy { f, g, fam })
    }

    pub fn h(&self, i: usize) -> MultilinearMap {
        self.fam.comp(i)
    }

    pub fn comps(&self, n: usize) -> Vec<MultilinearMap> {
        self.fam.comps(n)
    }

    /// Unshifted component `h_i` of degree `-i`.
    pub fn h_unshifted(&self, i: usize) -> MultilinearMap {
        unshift_from_bar(&self.h(i))
    }

    pub fn check_homotopy(&self) -> MorphismReport {
        let n = self.f.max_arity();
        let b: Vec<MultilinearMap> = (1..=n).map(|i| self.f.dom.b(i)).collect();
        let bp: Vec<MultilinearMap> = (1..=n).map(|i| self.f.cod.b(i)).collect();
        let fc = self.f.comps(n);
        let gc = self.g.comps(n);
        let hc = self.comps(n);
        let part1 = structure_after_mixed_coderivation(&bp, &fc, &hc, &gc, n);
        let part2 = family_after_coderivation(&hc, &b);
        let mut residuals = Vec::new();
        let mut pass = true;
        for m in 1..=n {
            let res = fc[m - 1]
                .sub(&gc[m - 1])
                .sub(&part1[m - 1])
                .sub(&part2[m - 1]);
            let witness = res.first_entry().map(|(w, sv)| Witness {
                word: self.f.dom.word_names(w),
                value: sv_render(sv, &self.f.cod.sa),
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
        MorphismReport {
            max_arity_checked: n,
            pass,
            residuals,
        }
    }
}

/// Deforms a morphism along a homotopy family: given `f` and degree `-1`
/// components `H_i`, builds the unique morphism `g` with
/// `g = f - b' ∘ cod_{f,g}(H) - cod_{f,g}(H) ∘ b`, solved arity by arity
/// (the right-hand side at arity `m` involves `g` only below arity `m`).
pub fn deform_by_homotopy(
    f: &AInfMorphism,
    h: Vec<MultilinearMap>,
) -> Result<(AInfMorphism, Homotopy)> {
    let n = f.max_arity();
    let b: Vec<MultilinearMap> = (1..=n).map(|i| f.dom.b(i)).collect();
    let bp: Vec<MultilinearMap> = (1..=n).map(|i| f.cod.b(i)).collect();
    let fc = f.comps(n);
    let hfam = Family::new(f.dom.sa.clone(), f.cod.sa.clone(), h, -1)?;
    let hc = hfam.comps(n);
    let hb = family_after_coderivation(&hc, &b);
    let mut gc: Vec<MultilinearMap> = Vec::with_capacity(n);
    for m in 1..=n {
        let mut gext = gc.clone();
        gext.push(MultilinearMap::zero(
            vec![f.dom.sa.clone(); m],
            f.cod.sa.clone(),
            0,
        ));
        let mixed = structure_after_mixed_coderivation(&bp, &fc, &hc, &gext, m);
        gc.push(fc[m - 1].sub(&mixed[m - 1]).sub(&hb[m - 1]));
    }
    let g = AInfMorphism::new(f.dom.clone(), f.cod.clone(), gc, Some(f.obj_map.clone()))?;
    let stored = hfam.stored_len();
    let homotopy = Homotopy::new(f.clone(), g.clone(), hfam.comps(stored))?;
    Ok((g, homotopy))
}

/// Matrix of an arity-1 map (rows = target basis, cols = source basis).
pub fn map1_to_mat(f: &MultilinearMap) -> Mat {
    assert_eq!(f.arity(), 1);
    let mut m = Mat::zero(f.target.field, f.target.dim(), f.sources[0].dim());
    for (w, sv) in f.entries() {
        for (o, c) in sv {
            m.set(*o, w[0], c.clone());
        }
    }
    m
}

/// Arity-1 map from a matrix.
pub fn mat_to_map1(m: &Mat, dom: &Space, cod: &Space, degree: i64) -> MultilinearMap {
    let mut f = MultilinearMap::zero(vec![dom.clone()], cod.clone(), degree);
    for c in 0..m.cols {
        let col = m.col(c);
        if !col.is_empty() {
            f.set(vec![c], col);
        }
    }
    f
}

/// One graded piece of the cohomology of `(A, m_1)`: the hom pair, the
/// degree, the ambient basis indices of that slice, and the subquotient.
#[derive(Debug, Clone)]
pub struct CohBlock {
    pub src: usize,
    pub tgt: usize,
    pub degree: i64,
    /// Base-space indices of the slice, in order.
    pub indices: Vec<usize>,
    pub sub: Subquotient,
}

impl CohBlock {
    /// Converts a base-space vector supported on this slice to local
    /// coordinates (`None` if it has support outside the slice).
    pub fn to_local(&self, v: &Sv) -> Option<Sv> {
        let mut out = Vec::with_capacity(v.len());
        for (i, c) in v {
            let k = self.indices.iter().position(|j| j == i)?;
            out.push((k, c.clone()));
        }
        out.sort_by_key(|(i, _)| *i);
        Some(out)
    }

    pub fn from_local(&self, v: &Sv) -> Sv {
        let mut out: Sv = v.iter().map(|(k, c)| (self.indices[*k], c.clone())).collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }
}

/// Cohomology of the underlying complex, block by block.
#[derive(Debug, Clone)]
pub struct Cohomology {
    pub blocks: Vec<CohBlock>,
}

impl Cohomology {
    pub fn block(&self, src: usize, tgt: usize, degree: i64) -> Option<&CohBlock> {
        self.blocks
            .iter()
            .find(|b| b.src == src && b.tgt == tgt && b.degree == degree)
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.sub.dim()).sum()
    }
}

/// Computes the cohomology of `(A, m_1)`, sliced by hom pair and degree,
/// with deterministic representatives.
pub fn cohomology(a: &AInfStructure) -> Cohomology {
    let m1 = a.m(1);
    let field = a.field();
    // Slice the basis.
    let mut slices: BTreeMap<(usize, usize, i64), Vec<usize>> = BTreeMap::new();
    for (i, b) in a.base.basis.iter().enumerate() {
        slices.entry((b.src, b.tgt, b.degree)).or_default().push(i);
    }
    let slice_of = |src: usize, tgt: usize, d: i64| -> Vec<usize> {
        slices.get(&(src, tgt, d)).cloned().unwrap_or_default()
    };
    // Matrix of m_1 restricted to a slice.
    let mat_between = |from: &[usize], to: &[usize]| -> Mat {
        let mut m = Mat::zero(field, to.len(), from.len());
        for (cj, &j) in from.iter().enumerate() {
            for (o, c) in m1.eval_word(&[j]) {
                if let Some(ri) = to.iter().position(|&t| t == o) {
                    m.set(ri, cj, c.clone());
                }
            }
        }
        m
    };
    let mut blocks = Vec::new();
    for (&(src, tgt, d), idx) in &slices {
        let below = slice_of(src, tgt, d - 1);
        let above = slice_of(src, tgt, d + 1);
        let din = mat_between(&below, idx);
        let dout = mat_between(idx, &above);
        let sub = Subquotient::new(&din, &dout);
        blocks.push(CohBlock {
            src,
            tgt,
            degree: d,
            indices: idx.clone(),
            sub,
        });
    }
    Cohomology { blocks }
}

/// Per-block outcome of the quasi-isomorphism test.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiIsoBlock {
    pub src: usize,
    pub tgt: usize,
    pub degree: i64,
    pub dim_dom: usize,
    pub dim_cod: usize,
    pub bijective: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiIsoReport {
    pub pass: bool,
    pub blocks: Vec<QuasiIsoBlock>,
}

/// Does the linear part induce an isomorphism on cohomology? Exact Gaussian
/// elimination block by block; deterministic.
pub fn quasi_iso(f: &AInfMorphism) -> Result<QuasiIsoReport> {
    let dom_coh = cohomology(&f.dom);
    let cod_coh = cohomology(&f.cod);
    let f1 = f.f_unshifted(1);
    let field = f.dom.field();
    // Collect all block keys relevant on either side.
    let mut keys: Vec<(usize, usize, i64)> = Vec::new();
    for b in &dom_coh.blocks {
        let key = (f.obj_map[b.src], f.obj_map[b.tgt], b.degree);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    for b in &cod_coh.blocks {
        let key = (b.src, b.tgt, b.degree);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.sort();
    let mut blocks = Vec::new();
    let mut pass = true;
    for (src, tgt, degree) in keys {
        // Union of all dom blocks mapping to this key.
        let dom_blocks: Vec<&CohBlock> = dom_coh
            .blocks
            .iter()
            .filter(|b| f.obj_map[b.src] == src && f.obj_map[b.tgt] == tgt && b.degree == degree)
            .collect();
        let dim_dom: usize = dom_blocks.iter().map(|b| b.sub.dim()).sum();
        let cod_block = cod_coh.block(src, tgt, degree);
        let dim_cod = cod_block.map(|b| b.sub.dim()).unwrap_or(0);
        let mut bijective = dim_dom == dim_cod;
        if bijective && dim_dom > 0 {
            let cb = cod_block.unwrap();
            let mut mat = Mat::zero(field, dim_cod, dim_dom);
            let mut col = 0usize;
            'cols: for db in &dom_blocks {
                for k in 0..db.sub.dim() {
                    let rep = db.from_local(&db.sub.representative(k));
                    let img = f1.eval_tensor(&[&rep]);
                    let Some(local) = cb.to_local(&img) else {
                        bijective = false;
                        break 'cols;
                    };
                    let Some(cls) = cb.sub.reduce(&local) else {
                        return Err(Error::check(
                            "quasi-isomorphism",
                            "image of a cycle is not a cycle (linear part is not a chain map)"
                                .to_string(),
                        ));
                    };
                    mat.set_col(col, &cls);
                    col += 1;
                }
            }
            if bijective {
                bijective = linalg::invertible(&mat);
            }
        }
        if !bijective {
            pass = false;
        }
        blocks.push(QuasiIsoBlock {
            src,
            tgt,
            degree,
            dim_dom,
            dim_cod,
            bijective,
        });
    }
    Ok(QuasiIsoReport { pass, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    // d(a) = b, with a surviving degree-1 class c.
    fn complex_with_h1() -> AInfStructure {
        let base = Space::simple(q(), &[("a", 0), ("b", 1), ("c", 1)]);
        let mut d = MultilinearMap::zero(vec![base.clone()], base.clone(), 1);
        d.set(vec![0], vec![(1, q().one())]);
        AInfStructure::from_unshifted(base, 2, &[d], None).unwrap()
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
    fn composition_counts() {
        assert_eq!(compositions(5, 2).len(), 4);
        assert_eq!(compositions(5, 3).len(), 6);
        assert_eq!(compositions(4, 4), vec![vec![1, 1, 1, 1]]);
        assert!(compositions(3, 5).is_empty());
    }

    #[test]
    fn identity_is_a_morphism() {
        let a = ternary_only();
        let id = AInfMorphism::identity(&a);
        assert!(id.check_morphism().pass);
    }

    #[test]
    fn family_inverse_round_trip() {
        let a = ternary_only();
        let mut f1 = MultilinearMap::identity(&a.sa);
        f1 = f1.scale(&q().from_i64(2));
        let mut f2 = MultilinearMap::zero(vec![a.sa.clone(); 2], a.sa.clone(), 0);
        f2.set(vec![0, 0], vec![(0, q().one())]);
        let fam = Family::new(a.sa.clone(), a.sa.clone(), vec![f1, f2], 0).unwrap();
        assert!(fam.is_invertible());
        let inv = fam.inverse(4);
        for (x, y) in [(&fam, &inv), (&inv, &fam)] {
            let c = compose_components(&x.comps(4), &y.comps(4), 4);
            assert_eq!(c[0], MultilinearMap::identity(&a.sa));
            for m in &c[1..] {
                assert!(m.is_zero());
            }
        }
    }

    #[test]
    fn morphism_failure_has_witness() {
        let a = complex_with_h1();
        let cod = AInfStructure::from_unshifted(a.base.clone(), 2, &[], None).unwrap();
        let f = AInfMorphism::new(
            a.clone(),
            cod,
            vec![MultilinearMap::identity(&a.sa)],
            None,
        )
        .unwrap();
        let rep = f.check_morphism();
        assert!(!rep.pass);
        let fail = rep.first_failure().unwrap();
        assert_eq!(fail.arity, 1);
        assert_eq!(fail.witness.as_ref().unwrap().word, vec!["a"]);
    }

    #[test]
    fn linear_homotopy() {
        let base = Space::simple(q(), &[("a", 0), ("b", 1)]);
        let mut d = MultilinearMap::zero(vec![base.clone()], base.clone(), 1);
        d.set(vec![0], vec![(1, q().one())]);
        let a = AInfStructure::from_unshifted(base.clone(), 2, &[d], None).unwrap();
        let f = AInfMorphism::identity(&a);
        // g = 2·id = id + (d h + h d) for h(b) = a.
        let two_id = MultilinearMap::identity(&base).scale(&q().from_i64(2));
        let g = AInfMorphism::from_unshifted(a.clone(), a.clone(), &[two_id], None).unwrap();
        assert!(g.check_morphism().pass);
        // dh + hd = id = (2·id) - id, so h connects g = 2·id to f = id in the
        // orientation F - G = δ(H).
        let mut h = MultilinearMap::zero(vec![base.clone()], base.clone(), -1);
        h.set(vec![1], vec![(0, q().one())]);
        let hom = Homotopy::new(g, f.clone(), vec![shift_to_bar(&h)]).unwrap();
        assert!(hom.check_homotopy().pass);

        // The same homotopy does not connect 3·id to id.
        let three_id = MultilinearMap::identity(&base).scale(&q().from_i64(3));
        let g3 = AInfMorphism::from_unshifted(a.clone(), a.clone(), &[three_id], None).unwrap();
        let bad = Homotopy::new(g3, f, vec![shift_to_bar(&h)]).unwrap();
        let rep = bad.check_homotopy();
        assert!(!rep.pass);
        assert!(rep.first_failure().unwrap().witness.is_some());
    }

    #[test]
    fn deform_along_homotopy() {
        let a = ternary_only();
        let f = AInfMorphism::identity(&a);
        // Shifted degrees: sx ↦ 0, sz ↦ 1.
        let mut h1 = MultilinearMap::zero(vec![a.sa.clone()], a.sa.clone(), -1);
        h1.set(vec![1], vec![(0, q().one())]);
        let mut h2 = MultilinearMap::zero(vec![a.sa.clone(); 2], a.sa.clone(), -1);
        h2.set(vec![0, 1], vec![(0, q().one())]);
        let (g, hom) = deform_by_homotopy(&f, vec![h1, h2]).unwrap();
        assert!(!g.f(3).is_zero());
        let rep = g.check_morphism();
        assert!(rep.pass, "{:?}", rep.first_failure());
        let rep = hom.check_homotopy();
        assert!(rep.pass, "{:?}", rep.first_failure());
    }

    #[test]
    fn compose_invert_associate() {
        let a = ternary_only();
        let id = AInfMorphism::identity(&a);
        let mut h1 = MultilinearMap::zero(vec![a.sa.clone()], a.sa.clone(), -1);
        h1.set(vec![1], vec![(0, q().one())]);
        let (m1, _) = deform_by_homotopy(&id, vec![h1]).unwrap();
        let mut h2 = MultilinearMap::zero(vec![a.sa.clone(); 2], a.sa.clone(), -1);
        h2.set(vec![0, 1], vec![(0, q().one())]);
        let (m2, _) = deform_by_homotopy(&id, vec![MultilinearMap::zero(vec![a.sa.clone()], a.sa.clone(), -1), h2]).unwrap();

        let inv = m1.inverse().unwrap();
        assert_eq!(m1.compose(&inv).unwrap(), id);
        assert_eq!(inv.compose(&m1).unwrap(), id);

        let left = m2.compose(&m1).unwrap().compose(&inv).unwrap();
        let right = m2.compose(&m1.compose(&inv).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(m2.compose(&id).unwrap(), m2);
        assert_eq!(id.compose(&m2).unwrap(), m2);
    }

    #[test]
    fn cohomology_and_quasi_iso() {
        let cod = complex_with_h1();
        let coh = cohomology(&cod);
        assert_eq!(coh.total_dim(), 1);
        let block = coh.block(0, 0, 1).unwrap();
        assert_eq!(block.sub.dim(), 1);
        // b is a boundary, c generates the class.
        let b_local = block.to_local(&vec![(1, q().one())]).unwrap();
        assert_eq!(block.sub.reduce(&b_local).unwrap(), vec![]);

        let dom_base = Space::simple(q(), &[("c'", 1)]);
        let dom = AInfStructure::from_unshifted(dom_base.clone(), 2, &[], None).unwrap();
        let mut f1 = MultilinearMap::zero(vec![dom_base.clone()], cod.base.clone(), 0);
        f1.set(vec![0], vec![(2, q().one())]);
        let f = AInfMorphism::from_unshifted(dom.clone(), cod.clone(), &[f1], None).unwrap();
        assert!(f.check_morphism().pass);
        assert!(quasi_iso(&f).unwrap().pass);

        let zero = AInfMorphism::new(
            dom.clone(),
            cod.clone(),
            vec![MultilinearMap::zero(vec![dom.sa.clone()], cod.sa.clone(), 0)],
            None,
        )
        .unwrap();
        assert!(zero.check_morphism().pass);
        let rep = quasi_iso(&zero).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn unital_morphism_check() {
        let base = Space::simple(q(), &[("1", 0), ("e", 1)]);
        let mut mul = MultilinearMap::zero(vec![base.clone(); 2], base.clone(), 0);
        mul.set(vec![0, 0], vec![(0, q().one())]);
        mul.set(vec![0, 1], vec![(1, q().one())]);
        mul.set(vec![1, 0], vec![(1, q().one())]);
        let d = MultilinearMap::zero(vec![base.clone()], base.clone(), 1);
        let a = AInfStructure::from_dg_algebra(
            base.clone(),
            &d,
            &mul,
            3,
            Some(vec![vec![(0, q().one())]]),
        )
        .unwrap();
        assert!(AInfMorphism::identity(&a).check_unital().unwrap().pass);

        let two_id = MultilinearMap::identity(&base).scale(&q().from_i64(2));
        let f = AInfMorphism::from_unshifted(a.clone(), a.clone(), &[two_id], None).unwrap();
        let rep = f.check_unital().unwrap();
        assert!(!rep.pass);
        assert!(rep.witness.is_some());
    }
}
