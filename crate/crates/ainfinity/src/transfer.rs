//! Homotopy transfer along contractions of complexes.
//!
//! The transferred operations and morphism components are sums over planar
//! trees, evaluated entirely on the shifted side (where the sums carry no
//! signs; the unshifted signs fall out of the shift bijection). The
//! projection and homotopy completing the output to a contraction of
//! structures come from the perturbation recursion on the truncated bar
//! coalgebra; a separate entry point recomputes the tree sums that way for
//! cross-validation. A kernel-method morphism to the contractible cokernel
//! complex gives an independent consistency check (`g ∘ f = 0`), and a
//! deterministic splitting of `(A, m_1)` turns all of this into minimal
//! models.

use std::collections::BTreeMap;

use crate::ainf::AInfStructure;
use crate::bar::{word_sum_normalize, TruncatedBarCoalgebra, WordSum};
use crate::error::{Error, Result};
use crate::graded::{sv_add, sv_normalize, sv_scale, BasisElt, Space, Sv};
use crate::linalg::{nullspace, rref, solve, Mat};
use crate::morphism::{compositions, map1_to_mat, AInfMorphism, Homotopy};
use crate::multilinear::{shift_to_bar, MultilinearMap};

/// A finite-dimensional complex: a graded space with a square-zero
/// differential of degree `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub space: Space,
    pub d: MultilinearMap,
}

impl Complex {
    pub fn new(space: Space, d: MultilinearMap) -> Result<Complex> {
        space.validate().map_err(Error::Invalid)?;
        d.validate().map_err(Error::Invalid)?;
        if d.arity() != 1 || d.degree != 1 || d.sources[0] != space || d.target != space {
            return Err(Error::invalid(
                "differential must be a degree +1 endomorphism of the space",
            ));
        }
        let dd = d.compose1(&d);
        if let Some((w, sv)) = dd.first_entry() {
            return Err(Error::check(
                "d^2 = 0",
                format!("d^2({}) = {}", space.basis[w[0]].name, crate::graded::sv_render(sv, &space)),
            ));
        }
        Ok(Complex { space, d })
    }

    /// A complex with zero differential.
    pub fn minimal(space: Space) -> Complex {
        let d = MultilinearMap::zero(vec![space.clone()], space.clone(), 1);
        Complex { space, d }
    }
}

/// A contraction of `w` onto `v`: chain maps `i : V → W`, `ρ : W → V` and a
/// degree `-1` homotopy `H : W → W` with
/// `ρ∘i = 1`, `i∘ρ = 1 + d∘H + H∘d`, `H∘i = 0`, `ρ∘H = 0`, `H² = 0`.
/// All five identities are verified at construction.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub v: Complex,
    pub w: Complex,
    pub i: MultilinearMap,
    pub rho: MultilinearMap,
    pub h: MultilinearMap,
}

impl Contraction {
    pub fn new(
        v: Complex,
        w: Complex,
        i: MultilinearMap,
        rho: MultilinearMap,
        h: MultilinearMap,
    ) -> Result<Contraction> {
        if v.space.objects != w.space.objects {
            return Err(Error::invalid("contraction endpoints have different objects"));
        }
        let shape = |f: &MultilinearMap, dom: &Space, cod: &Space, deg: i64, name: &str| {
            if f.arity() != 1 || f.degree != deg || f.sources[0] != *dom || f.target != *cod {
                return Err(Error::invalid(format!("{name} has the wrong shape")));
            }
            f.validate().map_err(Error::Invalid)
        };
        shape(&i, &v.space, &w.space, 0, "i")?;
        shape(&rho, &w.space, &v.space, 0, "rho")?;
        shape(&h, &w.space, &w.space, -1, "h")?;
        let fail = |axiom: &str, bad: &MultilinearMap, sp: &Space| -> Error {
            let (word, sv) = bad.first_entry().expect("nonzero map has an entry");
            Error::check(
                axiom,
                format!(
                    "fails on {} with value {}",
                    bad.sources[0].basis[word[0]].name,
                    crate::graded::sv_render(sv, sp)
                ),
            )
        };
        let r = w.d.compose1(&i).sub(&i.compose1(&v.d));
        if !r.is_zero() {
            return Err(fail("i is a chain map", &r, &w.space));
        }
        let r = v.d.compose1(&rho).sub(&rho.compose1(&w.d));
        if !r.is_zero() {
            return Err(fail("rho is a chain map", &r, &v.space));
        }
        let r = rho.compose1(&i).sub(&MultilinearMap::identity(&v.space));
        if !r.is_zero() {
            return Err(fail("rho ∘ i = 1", &r, &v.space));
        }
        let r = i
            .compose1(&rho)
            .sub(&MultilinearMap::identity(&w.space))
            .sub(&w.d.compose1(&h))
            .sub(&h.compose1(&w.d));
        if !r.is_zero() {
            return Err(fail("i ∘ rho = 1 + d∘h + h∘d", &r, &w.space));
        }
        let r = h.compose1(&i);
        if !r.is_zero() {
            return Err(fail("h ∘ i = 0", &r, &w.space));
        }
        let r = rho.compose1(&h);
        if !r.is_zero() {
            return Err(fail("rho ∘ h = 0", &r, &v.space));
        }
        let r = h.compose1(&h);
        if !r.is_zero() {
            return Err(fail("h² = 0", &r, &w.space));
        }
        Ok(Contraction { v, w, i, rho, h })
    }

    /// The identity contraction of a complex onto itself (`h = 0`).
    pub fn trivial(c: &Complex) -> Contraction {
        Contraction {
            v: c.clone(),
            w: c.clone(),
            i: MultilinearMap::identity(&c.space),
            rho: MultilinearMap::identity(&c.space),
            h: MultilinearMap::zero(vec![c.space.clone()], c.space.clone(), -1),
        }
    }
}

/// A rooted planar tree with every internal vertex of arity ≥ 2, leaves
/// ordered left to right.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PlanarTree {
    Leaf,
    Node(Vec<PlanarTree>),
}

impl PlanarTree {
    pub fn leaves(&self) -> usize {
        match self {
            PlanarTree::Leaf => 1,
            PlanarTree::Node(ch) => ch.iter().map(|c| c.leaves()).sum(),
        }
    }

    /// The largest vertex arity occurring in the tree (0 for a bare leaf).
    pub fn max_vertex_arity(&self) -> usize {
        match self {
            PlanarTree::Leaf => 0,
            PlanarTree::Node(ch) => ch
                .len()
                .max(ch.iter().map(|c| c.max_vertex_arity()).max().unwrap_or(0)),
        }
    }
}

fn all_trees(n: usize) -> Vec<PlanarTree> {
    if n == 1 {
        return vec![PlanarTree::Leaf];
    }
    let mut out = Vec::new();
    for r in 2..=n {
        for parts in compositions(n, r) {
            let choices: Vec<Vec<PlanarTree>> = parts.iter().map(|&p| all_trees(p)).collect();
            let mut stack: Vec<Vec<PlanarTree>> = vec![Vec::new()];
            for c in &choices {
                let mut next = Vec::new();
                for partial in &stack {
                    for t in c {
                        let mut p = partial.clone();
                        p.push(t.clone());
                        next.push(p);
                    }
                }
                stack = next;
            }
            out.extend(stack.into_iter().map(PlanarTree::Node));
        }
    }
    out
}

/// All planar trees with `n_leaves` leaves and internal arity ≥ 2, in a
/// fixed deterministic order (root arity, then leaf distribution, then
/// children lexicographically).
pub fn enumerate_trees(n_leaves: usize) -> Result<Vec<PlanarTree>> {
    if n_leaves < 2 {
        return Err(Error::invalid("tree enumeration needs at least 2 leaves"));
    }
    Ok(all_trees(n_leaves))
}

/// The composite obtained by coloring the suspended tree: `i` on leaves,
/// `b_{|v|}` on internal vertices, `h` on the new midpoint vertices of
/// internal edges, and `ρ` at the root; everything on the shifted side where
/// the transferred sums carry no signs.
pub fn tree_composite(
    t: &PlanarTree,
    c: &Contraction,
    a: &AInfStructure,
) -> Result<MultilinearMap> {
    let i_s = shift_to_bar(&c.i);
    let rho_s = shift_to_bar(&c.rho);
    let h_s = shift_to_bar(&c.h);
    if t.max_vertex_arity() > a.max_arity {
        return Err(Error::invalid(format!(
            "tree has a vertex of arity {} but the structure stops at {}",
            t.max_vertex_arity(),
            a.max_arity
        )));
    }
    match t {
        PlanarTree::Leaf => Ok(rho_s.compose1(&i_s)),
        PlanarTree::Node(ch) => Ok(rho_s.compose1(&node_core(ch, &i_s, &h_s, a))),
    }
}

/// `b_k ∘ (leg(c_1) ⊗ … ⊗ leg(c_k))` for the children of a vertex, where a
/// leaf leg is `i` and an internal leg is `h ∘ (its own core)`.
fn node_core(
    children: &[PlanarTree],
    i_s: &MultilinearMap,
    h_s: &MultilinearMap,
    a: &AInfStructure,
) -> MultilinearMap {
    let legs: Vec<MultilinearMap> = children
        .iter()
        .map(|c| match c {
            PlanarTree::Leaf => i_s.clone(),
            PlanarTree::Node(ch) => h_s.compose1(&node_core(ch, i_s, h_s, a)),
        })
        .collect();
    let refs: Vec<&MultilinearMap> = legs.iter().collect();
    a.b(children.len()).compose_blocks(&refs)
}

/// The result of a transfer: the structure on `V`, the inclusion-side
/// morphism `f : V → A`, the projection `q : A → V`, and the homotopy
/// between the identity of `A` and `f ∘ q`. Together these form a
/// contraction at the level of structures: `q ∘ f` is the identity.
#[derive(Debug, Clone)]
pub struct TransferOutput {
    pub structure: AInfStructure,
    pub f: AInfMorphism,
    pub q: AInfMorphism,
    pub homotopy: Homotopy,
}

/// Word-level operators for the perturbation recursion on the truncated bar
/// coalgebra of `a`: the length-decreasing part of the differential, the
/// one-sided lift of the contracting homotopy, and the geometric series
/// built from them.
struct Perturbation {
    bar: TruncatedBarCoalgebra,
    id_fam: Vec<MultilinearMap>,
    ir_fam: Vec<MultilinearMap>,
    h_fam: Vec<MultilinearMap>,
    delta_comps: Vec<MultilinearMap>,
    i_s: MultilinearMap,
    rho_s: MultilinearMap,
    h_s: MultilinearMap,
}

impl Perturbation {
    fn new(a: &AInfStructure, c: &Contraction, bound: usize) -> Result<Perturbation> {
        let i_s = shift_to_bar(&c.i);
        let rho_s = shift_to_bar(&c.rho);
        let h_s = shift_to_bar(&c.h);
        let mut delta_comps =
            vec![MultilinearMap::zero(vec![a.sa.clone()], a.sa.clone(), 1)];
        for k in 2..=a.max_arity.min(bound) {
            delta_comps.push(a.b(k));
        }
        Ok(Perturbation {
            bar: TruncatedBarCoalgebra::new(a, bound, false)?,
            id_fam: vec![MultilinearMap::identity(&a.sa)],
            ir_fam: vec![i_s.compose1(&rho_s)],
            h_fam: vec![h_s.clone()],
            delta_comps,
            i_s,
            rho_s,
            h_s,
        })
    }

    fn through<F>(&self, map: F, ws: &WordSum) -> WordSum
    where
        F: Fn(&[usize]) -> WordSum,
    {
        let mut out = Vec::new();
        for (w, coeff) in ws {
            for (ow, oc) in map(w) {
                out.push((ow, oc.mul(coeff)));
            }
        }
        word_sum_normalize(out)
    }

    /// The word-length-decreasing part of the bar differential.
    fn delta(&self, ws: &WordSum) -> WordSum {
        self.through(
            |w| {
                self.bar
                    .apply_coderivation(&self.id_fam, &self.id_fam, &self.delta_comps, w)
            },
            ws,
        )
    }

    /// The lift of the contracting homotopy: identity letters to the left of
    /// the `h` slot, `i∘ρ` letters to the right.
    fn hbar(&self, ws: &WordSum) -> WordSum {
        self.through(
            |w| {
                self.bar
                    .apply_coderivation(&self.id_fam, &self.ir_fam, &self.h_fam, w)
            },
            ws,
        )
    }

    /// `t = δ + δ𝐇δ + δ𝐇δ𝐇δ + …`; finite because δ strictly shortens words.
    fn series(&self, ws: &WordSum) -> WordSum {
        let mut out = Vec::new();
        let mut cur = self.delta(ws);
        while !cur.is_empty() {
            out.extend(cur.iter().cloned());
            cur = self.delta(&self.hbar(&cur));
        }
        word_sum_normalize(out)
    }

    /// The length-one part of a word sum, as a vector over `SA`.
    fn cogenerator(ws: &WordSum) -> Sv {
        sv_normalize(
            ws.iter()
                .filter(|(w, _)| w.len() == 1)
                .map(|(w, c)| (w[0], c.clone()))
                .collect(),
        )
    }

    fn eval_letterwise(map: &MultilinearMap, v: &Sv) -> Sv {
        let mut out = Vec::new();
        for (idx, c) in v {
            out = sv_add(&out, &sv_scale(&map.eval_word(&[*idx]), c));
        }
        out
    }
}

/// Transfers the structure of `a` across a contraction of its underlying
/// complex `(A, m_1)` onto `(V, d_V)`, producing operations and a morphism
/// up to arity `n` together with the projection and homotopy completing a
/// contraction of structures. Operations and morphism components are sums
/// over planar trees; the projection and homotopy come from the perturbation
/// recursion on the truncated bar coalgebra.
pub fn transfer(a: &AInfStructure, c: &Contraction, n: usize) -> Result<TransferOutput> {
    if n == 0 {
        return Err(Error::invalid("transfer needs arity bound at least 1"));
    }
    if c.w.space != a.base || c.w.d != a.m(1) {
        return Err(Error::invalid(
            "contraction is not a contraction of the structure's underlying complex",
        ));
    }
    let stasheff = a.check_stasheff();
    if !stasheff.pass {
        let fail = stasheff.first_failure().expect("failed report has a failure");
        return Err(Error::check(
            "transfer input",
            format!("structure fails at arity {}", fail.arity),
        ));
    }

    let i_s = shift_to_bar(&c.i);
    let rho_s = shift_to_bar(&c.rho);
    let h_s = shift_to_bar(&c.h);

    // Operations and morphism components as sums over planar trees.
    let mut b_comps = vec![shift_to_bar(&c.v.d)];
    let mut f_comps = vec![i_s.clone()];
    let v_sa = c.v.space.suspend(1);
    for m in 2..=n {
        let mut bm = MultilinearMap::zero(vec![v_sa.clone(); m], v_sa.clone(), 1);
        let mut fm = MultilinearMap::zero(vec![v_sa.clone(); m], a.sa.clone(), 0);
        for t in all_trees(m) {
            if t.max_vertex_arity() > a.max_arity {
                continue;
            }
            let PlanarTree::Node(ch) = &t else { unreachable!("m ≥ 2") };
            let core = node_core(ch, &i_s, &h_s, a);
            bm = bm.add(&rho_s.compose1(&core));
            fm = fm.add(&h_s.compose1(&core));
        }
        b_comps.push(bm);
        f_comps.push(fm);
    }
    let unit = a.unit.as_ref().map(|units| {
        units
            .iter()
            .map(|u| c.rho.eval_tensor(&[u]))
            .collect::<Vec<Sv>>()
    });
    let structure = AInfStructure::from_shifted(c.v.space.clone(), n, b_comps, unit)?;
    let f = AInfMorphism::new(structure.clone(), a.clone(), f_comps, None)?;

    // Projection and homotopy through the perturbation series.
    let p = Perturbation::new(a, c, n)?;
    let mut q_comps = vec![rho_s.clone()];
    let mut h_comps = vec![h_s.clone()];
    for m in 2..=n {
        let mut qm = MultilinearMap::zero(vec![a.sa.clone(); m], v_sa.clone(), 0);
        let mut hm = MultilinearMap::zero(vec![a.sa.clone(); m], a.sa.clone(), -1);
        for word in a.sa.words(m) {
            let seed = p.hbar(&vec![(word.clone(), a.field().one())]);
            let pushed = p.series(&seed);
            let co = Perturbation::cogenerator(&pushed);
            if co.is_empty() {
                continue;
            }
            let qv = Perturbation::eval_letterwise(&rho_s, &co);
            if !qv.is_empty() {
                qm.set(word.clone(), qv);
            }
            let hv = Perturbation::eval_letterwise(&h_s, &co);
            if !hv.is_empty() {
                hm.set(word.clone(), hv);
            }
        }
        q_comps.push(qm);
        h_comps.push(hm);
    }
    let q = AInfMorphism::new(a.clone(), structure.clone(), q_comps, None)?;
    let composite = f.compose(&q)?;
    let homotopy = Homotopy::new(
        AInfMorphism::identity(a),
        composite,
        h_comps.iter().map(|h| h.neg()).collect(),
    )?;
    Ok(TransferOutput {
        structure,
        f,
        q,
        homotopy,
    })
}

/// Recomputes the transferred operations and morphism components through the
/// perturbation series on the truncated bar coalgebra instead of tree sums.
/// Cross-validation partner for [`transfer`].
pub fn transfer_via_perturbation(
    a: &AInfStructure,
    c: &Contraction,
    n: usize,
) -> Result<(Vec<MultilinearMap>, Vec<MultilinearMap>)> {
    if n == 0 {
        return Err(Error::invalid("transfer needs arity bound at least 1"));
    }
    if c.w.space != a.base || c.w.d != a.m(1) {
        return Err(Error::invalid(
            "contraction is not a contraction of the structure's underlying complex",
        ));
    }
    let p = Perturbation::new(a, c, n)?;
    let v_sa = c.v.space.suspend(1);
    let mut b_comps = vec![shift_to_bar(&c.v.d)];
    let mut f_comps = vec![p.i_s.clone()];
    for m in 2..=n {
        let mut bm = MultilinearMap::zero(vec![v_sa.clone(); m], v_sa.clone(), 1);
        let mut fm = MultilinearMap::zero(vec![v_sa.clone(); m], a.sa.clone(), 0);
        for word in v_sa.words(m) {
            // Strict letterwise image of the word under i (degree 0: no signs).
            let mut image: WordSum = vec![(Vec::new(), a.field().one())];
            for &letter in &word {
                let img = p.i_s.eval_word(&[letter]);
                let mut next = Vec::new();
                for (prefix, c0) in &image {
                    for (o, c1) in &img {
                        let mut w = prefix.clone();
                        w.push(*o);
                        next.push((w, c0.mul(c1)));
                    }
                }
                image = next;
            }
            let pushed = p.series(&word_sum_normalize(image));
            let co = Perturbation::cogenerator(&pushed);
            if co.is_empty() {
                continue;
            }
            let bv = Perturbation::eval_letterwise(&p.rho_s, &co);
            if !bv.is_empty() {
                bm.set(word.clone(), bv);
            }
            let fv = Perturbation::eval_letterwise(&p.h_s, &co);
            if !fv.is_empty() {
                fm.set(word.clone(), fv);
            }
        }
        b_comps.push(bm);
        f_comps.push(fm);
    }
    Ok((b_comps, f_comps))
}

/// Builds the cokernel data of a contraction: the complement complex
/// `K = im(1 - i∘ρ)` as its own complex, the projection `p : W → K`, and the
/// contracting homotopy `h = -p∘H∘σ` (so that `d∘h + h∘d = 1` and `h² = 0`).
pub fn kernel_data(c: &Contraction) -> Result<(Complex, MultilinearMap, MultilinearMap)> {
    let w = &c.w.space;
    let proj = MultilinearMap::identity(w).sub(&c.i.compose1(&c.rho));
    let pm = map1_to_mat(&proj);

    let mut slices: BTreeMap<(usize, usize, i64), Vec<usize>> = BTreeMap::new();
    for (j, b) in w.basis.iter().enumerate() {
        slices.entry((b.src, b.tgt, b.degree)).or_default().push(j);
    }
    let mut basis = Vec::new();
    let mut columns: Vec<Sv> = Vec::new();
    let mut slice_of: BTreeMap<(usize, usize, i64), (usize, Vec<usize>)> = BTreeMap::new();
    for (&(src, tgt, degree), idx) in &slices {
        let mut block = Mat::zero(w.field, idx.len(), idx.len());
        for (cj, &j) in idx.iter().enumerate() {
            for (rj, &r) in idx.iter().enumerate() {
                block.set(rj, cj, pm.at(r, j).clone());
            }
        }
        let piv = rref(&block).pivot_cols();
        let offset = basis.len();
        for &pc in &piv {
            basis.push(BasisElt {
                name: format!("k{}", basis.len()),
                degree,
                src,
                tgt,
            });
            columns.push(pm.col(idx[pc]));
        }
        slice_of.insert((src, tgt, degree), (offset, piv.iter().map(|&pc| idx[pc]).collect()));
    }
    let kspace = Space {
        field: w.field,
        objects: w.objects.clone(),
        basis,
    };
    let mut sigma = MultilinearMap::zero(vec![kspace.clone()], w.clone(), 0);
    for (k, col) in columns.iter().enumerate() {
        sigma.set(vec![k], col.clone());
    }
    // p(x) expresses (1 - iρ)x in the chosen column basis, blockwise.
    let mut p = MultilinearMap::zero(vec![w.clone()], kspace.clone(), 0);
    for (&(src, tgt, degree), idx) in &slices {
        let (offset, ref piv_ambient) = slice_of[&(src, tgt, degree)];
        if piv_ambient.is_empty() {
            continue;
        }
        let mut local = Mat::zero(w.field, idx.len(), piv_ambient.len());
        for (ck, &amb) in piv_ambient.iter().enumerate() {
            let col = pm.col(amb);
            let v: Sv = col
                .iter()
                .filter_map(|(r, x)| idx.iter().position(|&t| t == *r).map(|p| (p, x.clone())))
                .collect();
            local.set_col(ck, &v);
        }
        for &j in idx {
            let img = pm.col(j);
            if img.is_empty() {
                continue;
            }
            let v: Sv = img
                .iter()
                .filter_map(|(r, x)| idx.iter().position(|&t| t == *r).map(|p| (p, x.clone())))
                .collect();
            let coords = solve(&local, &v).expect("projection image lies in the column space");
            let shifted: Sv = coords.into_iter().map(|(k, x)| (offset + k, x)).collect();
            if !shifted.is_empty() {
                p.set(vec![j], sv_normalize(shifted));
            }
        }
    }
    let dk = p.compose1(&c.w.d.compose1(&sigma));
    let h = p.compose1(&c.h.compose1(&sigma)).neg();
    Ok((Complex::new(kspace, dk)?, p, h))
}

/// The kernel-method morphism `g : A → K` into a contractible complex:
/// `g_1 = p` and each higher component is the contracting homotopy applied
/// to the cycle assembled from the lower ones. Its defining property is
/// `g ∘ f = 0` for the transferred inclusion `f`.
pub fn kernel_morphism(
    a: &AInfStructure,
    k: &Complex,
    p: &MultilinearMap,
    h: &MultilinearMap,
) -> Result<AInfMorphism> {
    if k.space.objects != a.base.objects {
        return Err(Error::invalid("cokernel complex has different objects"));
    }
    if p.arity() != 1 || p.degree != 0 || p.sources[0] != a.base || p.target != k.space {
        return Err(Error::invalid("p must be a degree-0 map A → K"));
    }
    if h.arity() != 1 || h.degree != -1 || h.sources[0] != k.space || h.target != k.space {
        return Err(Error::invalid("h must be a degree -1 endomorphism of K"));
    }
    let r = k.d.compose1(p).sub(&p.compose1(&a.m(1)));
    if !r.is_zero() {
        return Err(Error::check("p is a chain map", "d_K ∘ p ≠ p ∘ d_A"));
    }
    let r = k
        .d
        .compose1(h)
        .add(&h.compose1(&k.d))
        .sub(&MultilinearMap::identity(&k.space));
    if !r.is_zero() {
        return Err(Error::check("h contracts K", "d∘h + h∘d ≠ 1"));
    }
    if !h.compose1(h).is_zero() {
        return Err(Error::check("h contracts K", "h² ≠ 0"));
    }

    let ks = AInfStructure::from_unshifted(k.space.clone(), a.max_arity, &[k.d.clone()], None)?;
    let h_s = shift_to_bar(h);
    let mut comps = vec![shift_to_bar(p)];
    for m in 2..=a.max_arity {
        // The cycle at arity m: all ways of collapsing a block of ≥ 2 inputs
        // with b and applying a lower component.
        let mut cycle = MultilinearMap::zero(
            vec![a.sa.clone(); m],
            shift_to_bar(p).target.clone(),
            1,
        );
        for kk in 2..=m.min(a.max_arity) {
            let b = a.b(kk);
            let lower = &comps[m - kk];
            for j in 0..lower.arity() {
                cycle = cycle.add(&lower.insert(&b, j));
            }
        }
        comps.push(h_s.compose1(&cycle));
    }
    AInfMorphism::new(a.clone(), ks, comps, None)
}

/// A deterministic splitting of a complex: pivot-chosen bases for the
/// boundaries `B`, cohomology representatives `R`, and a complement `C`
/// mapped isomorphically onto the next boundaries; the contraction with
/// `V = R` (zero differential), `H` inverting `d` from `B` back into `C`
/// (with a sign) and vanishing elsewhere. When unit candidates are supplied
/// and represent nonzero classes, the unit is chosen first among the
/// representatives, so the induced inclusion preserves it on the nose.
pub fn split_complex(
    space: &Space,
    d: &MultilinearMap,
    unit: Option<&[Sv]>,
) -> Result<Contraction> {
    let w = Complex::new(space.clone(), d.clone())?;
    let field = space.field;
    let mut slices: BTreeMap<(usize, usize, i64), Vec<usize>> = BTreeMap::new();
    for (j, b) in space.basis.iter().enumerate() {
        slices.entry((b.src, b.tgt, b.degree)).or_default().push(j);
    }
    let slice_of = |src: usize, tgt: usize, deg: i64| -> Vec<usize> {
        slices.get(&(src, tgt, deg)).cloned().unwrap_or_default()
    };
    let mat_between = |from: &[usize], to: &[usize]| -> Mat {
        let mut m = Mat::zero(field, to.len(), from.len());
        for (cj, &j) in from.iter().enumerate() {
            for (o, x) in d.eval_word(&[j]) {
                if let Some(ri) = to.iter().position(|&t| t == o) {
                    m.set(ri, cj, x.clone());
                }
            }
        }
        m
    };

    // Pass 1: per slice, a kernel basis and standard-vector complement.
    struct SliceSplit {
        z: Mat,
        c_local: Vec<usize>,
    }
    let mut splits: BTreeMap<(usize, usize, i64), SliceSplit> = BTreeMap::new();
    for (&(src, tgt, deg), idx) in &slices {
        let above = slice_of(src, tgt, deg + 1);
        let z = nullspace(&mat_between(idx, &above));
        // Extend the kernel columns to the whole slice by standard vectors.
        let mut ext = Mat::zero(field, idx.len(), z.cols + idx.len());
        for c0 in 0..z.cols {
            ext.set_col(c0, &z.col(c0));
        }
        for j in 0..idx.len() {
            ext.set(j, z.cols + j, field.one());
        }
        let c_local = rref(&ext)
            .pivot_cols()
            .into_iter()
            .filter(|&c0| c0 >= z.cols)
            .map(|c0| c0 - z.cols)
            .collect();
        splits.insert((src, tgt, deg), SliceSplit { z, c_local });
    }

    // Pass 2: boundaries from the complement below, then representatives.
    let mut v_basis: Vec<BasisElt> = Vec::new();
    let mut i_columns: Vec<Sv> = Vec::new();
    let mut rho_entries: Vec<(usize, Sv)> = Vec::new();
    let mut h_entries: Vec<(usize, Sv)> = Vec::new();
    let mut used_names: BTreeMap<(usize, usize, String), usize> = BTreeMap::new();

    for (&(src, tgt, deg), idx) in &slices {
        let split = &splits[&(src, tgt, deg)];
        let below = slice_of(src, tgt, deg - 1);
        let below_c: Vec<usize> = splits
            .get(&(src, tgt, deg - 1))
            .map(|s| s.c_local.clone())
            .unwrap_or_default();
        // Boundary basis: images of the complement vectors below (local
        // coordinates in this slice), aligned with their preimages.
        let mut b_cols: Vec<Sv> = Vec::new();
        let mut b_preimages: Vec<usize> = Vec::new();
        for &cl in &below_c {
            let amb = below[cl];
            let img: Sv = d
                .eval_word(&[amb])
                .into_iter()
                .filter_map(|(o, x)| idx.iter().position(|&t| t == o).map(|p| (p, x)))
                .collect();
            b_cols.push(sv_normalize(img));
            b_preimages.push(amb);
        }
        // Candidate representatives: the unit first (if it lives here and is
        // a nonzero class), then the kernel basis columns.
        let mut candidates: Vec<Sv> = Vec::new();
        if deg == 0 && src == tgt {
            if let Some(units) = unit {
                let u = &units[src];
                if !u.is_empty() {
                    let local: Option<Sv> = u
                        .iter()
                        .map(|(o, x)| idx.iter().position(|&t| t == *o).map(|p| (p, x.clone())))
                        .collect();
                    match local {
                        Some(l) => candidates.push(l),
                        None => {
                            return Err(Error::invalid(
                                "unit has components outside hom(x,x) in degree 0",
                            ))
                        }
                    }
                }
            }
        }
        for c0 in 0..split.z.cols {
            candidates.push(split.z.col(c0));
        }
        let mut ext = Mat::zero(field, idx.len(), b_cols.len() + candidates.len());
        for (k, b) in b_cols.iter().enumerate() {
            ext.set_col(k, b);
        }
        for (k, v) in candidates.iter().enumerate() {
            ext.set_col(b_cols.len() + k, v);
        }
        let r_cols: Vec<Sv> = rref(&ext)
            .pivot_cols()
            .into_iter()
            .filter(|&c0| c0 >= b_cols.len())
            .map(|c0| candidates[c0 - b_cols.len()].clone())
            .collect();
        let c_cols: Vec<Sv> = split
            .c_local
            .iter()
            .map(|&cl| vec![(cl, field.one())])
            .collect();

        // Change of basis [B | R | C] and its effect on every local vector.
        let total = b_cols.len() + r_cols.len() + c_cols.len();
        assert_eq!(total, idx.len(), "splitting does not span the slice");
        let mut pbasis = Mat::zero(field, idx.len(), total);
        for (k, v) in b_cols.iter().chain(r_cols.iter()).chain(c_cols.iter()).enumerate() {
            pbasis.set_col(k, v);
        }
        let v_offset = v_basis.len();
        for v in &r_cols {
            let lead = v.first().expect("representative is nonzero").0;
            let base_name = format!("[{}]", space.basis[idx[lead]].name);
            let seen = used_names.entry((src, tgt, base_name.clone())).or_insert(0);
            let name = if *seen == 0 {
                base_name.clone()
            } else {
                format!("{}#{}", base_name, *seen)
            };
            *seen += 1;
            v_basis.push(BasisElt {
                name,
                degree: deg,
                src,
                tgt,
            });
            i_columns.push(sv_normalize(
                v.iter().map(|(l, x)| (idx[*l], x.clone())).collect(),
            ));
        }
        for (jl, &amb) in idx.iter().enumerate() {
            let coords = solve(&pbasis, &vec![(jl, field.one())])
                .expect("change of basis is invertible");
            let mut rho_v: Sv = Vec::new();
            let mut h_v: Sv = Vec::new();
            for (k, x) in coords {
                if k < b_cols.len() {
                    // H sends this boundary back to minus its preimage.
                    h_v = sv_add(&h_v, &vec![(b_preimages[k], x.neg())]);
                } else if k < b_cols.len() + r_cols.len() {
                    rho_v = sv_add(
                        &rho_v,
                        &vec![(v_offset + (k - b_cols.len()), x)],
                    );
                }
            }
            if !rho_v.is_empty() {
                rho_entries.push((amb, rho_v));
            }
            if !h_v.is_empty() {
                h_entries.push((amb, h_v));
            }
        }
    }

    let v_space = Space {
        field,
        objects: space.objects.clone(),
        basis: v_basis,
    };
    let mut i = MultilinearMap::zero(vec![v_space.clone()], space.clone(), 0);
    for (k, col) in i_columns.into_iter().enumerate() {
        i.set(vec![k], col);
    }
    let mut rho = MultilinearMap::zero(vec![space.clone()], v_space.clone(), 0);
    for (amb, v) in rho_entries {
        rho.set(vec![amb], v);
    }
    let mut h = MultilinearMap::zero(vec![space.clone()], space.clone(), -1);
    for (amb, v) in h_entries {
        h.set(vec![amb], v);
    }
    Contraction::new(Complex::minimal(v_space), w, i, rho, h)
}

/// The minimal model: transfers across the deterministic splitting of
/// `(A, m_1)`. When `a` is strictly unital the splitting places the unit
/// among the representatives, so the model and the morphism stay strictly
/// unital.
pub fn minimal_model(a: &AInfStructure, n: usize) -> Result<(AInfStructure, AInfMorphism)> {
    let unit_for_split = match &a.unit {
        Some(units) if a.check_units()?.strict => Some(units.as_slice()),
        _ => None,
    };
    let c = split_complex(&a.base, &a.m(1), unit_for_split)?;
    let out = transfer(a, &c, n)?;
    Ok((out.structure, out.f))
}

/// The contraction used by [`minimal_model`], exposed so callers can run
/// [`transfer`], [`kernel_data`] and [`kernel_morphism`] against it.
pub fn minimal_model_contraction(a: &AInfStructure) -> Result<Contraction> {
    let unit_for_split = match &a.unit {
        Some(units) if a.check_units()?.strict => Some(units.as_slice()),
        _ => None,
    };
    split_complex(&a.base, &a.m(1), unit_for_split)
}
