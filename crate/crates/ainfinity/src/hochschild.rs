//! Hochschild cochains with bimodule coefficients, obstruction cycles for
//! extending truncated structures and morphisms one arity at a time, and
//! strictification of units by gauge transformations and homotopies.

use std::collections::{BTreeMap, BTreeSet};

use crate::ainf::AInfStructure;
use crate::error::{Error, Result};
use crate::graded::{Space, Sv};
use crate::linalg::{solve, Mat};
use crate::morphism::{
    compositions, deform_by_homotopy, AInfMorphism, Family, Homotopy,
};
use crate::multilinear::{shift_to_bar, unshift_from_bar, MultilinearMap};

/// A graded bimodule over a minimal structure with associative product:
/// actions `left: A ⊗ M → M` and `right: M ⊗ A → M`, both of degree 0,
/// validated against associativity and against each other. When the
/// structure carries units they must act as the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Bimodule {
    pub space: Space,
    pub left: MultilinearMap,
    pub right: MultilinearMap,
}

impl Bimodule {
    pub fn new(
        a: &AInfStructure,
        space: Space,
        left: MultilinearMap,
        right: MultilinearMap,
    ) -> Result<Bimodule> {
        if !a.is_minimal() {
            return Err(Error::Unsupported(
                "bimodule coefficients require a minimal structure".to_string(),
            ));
        }
        let mul = a.m(2);
        let defect = mul.insert(&mul, 0).sub(&mul.insert(&mul, 1));
        if let Some((w, _)) = defect.first_entry() {
            return Err(Error::check(
                "associative product",
                format!("associator does not vanish on {w:?}"),
            ));
        }
        let shape_ok = left.degree == 0
            && right.degree == 0
            && left.sources.as_slice() == [a.base.clone(), space.clone()]
            && right.sources.as_slice() == [space.clone(), a.base.clone()]
            && left.target == space
            && right.target == space;
        if !shape_ok {
            return Err(Error::invalid("bimodule actions have the wrong shape"));
        }
        left.validate().map_err(Error::invalid)?;
        right.validate().map_err(Error::invalid)?;
        let axioms = [
            ("left action associativity", left.insert(&mul, 0).sub(&left.insert(&left, 1))),
            ("right action associativity", right.insert(&right, 0).sub(&right.insert(&mul, 1))),
            ("action compatibility", right.insert(&left, 0).sub(&left.insert(&right, 1))),
        ];
        for (what, defect) in axioms {
            if let Some((w, _)) = defect.first_entry() {
                return Err(Error::check(what, format!("defect supported on {w:?}")));
            }
        }
        if a.unit.is_some() {
            let eta = a.unit_const()?;
            let id = MultilinearMap::identity(&space);
            if left.insert(&eta, 0) != id || right.insert(&eta, 1) != id {
                return Err(Error::check(
                    "units act as the identity on the bimodule",
                    "some unit insertion is not the identity",
                ));
            }
        }
        Ok(Bimodule { space, left, right })
    }

    /// The structure acting on itself by its own product.
    pub fn diagonal(a: &AInfStructure) -> Result<Bimodule> {
        Bimodule::new(a, a.base.clone(), a.m(2), a.m(2))
    }

    /// Coefficients in another algebra, with scalars restricted along
    /// degree-0 algebra maps (possibly different ones on the two sides).
    pub fn along(
        a: &AInfStructure,
        c: &AInfStructure,
        g_left: &MultilinearMap,
        g_right: &MultilinearMap,
    ) -> Result<Bimodule> {
        for g in [g_left, g_right] {
            if g.arity() != 1
                || g.degree != 0
                || g.sources[0] != a.base
                || g.target != c.base
            {
                return Err(Error::invalid("restriction maps must be degree-0 maps A → C"));
            }
            let defect = g
                .compose1(&a.m(2))
                .sub(&c.m(2).insert(g, 0).insert(g, 1));
            if let Some((w, _)) = defect.first_entry() {
                return Err(Error::check(
                    "restriction map is multiplicative",
                    format!("defect supported on {w:?}"),
                ));
            }
        }
        let left = c.m(2).insert(g_left, 0);
        let right = c.m(2).insert(g_right, 1);
        Bimodule::new(a, c.base.clone(), left, right)
    }
}

/// A multilinear cochain `A^{⊗n} → M`, `n ≥ 0` (arity 0: an element of `M`).
/// The stored map is unshifted; `map.degree` is its internal degree, which
/// the differential preserves while raising the arity by one.
#[derive(Debug, Clone, PartialEq)]
pub struct HochschildCochain {
    pub map: MultilinearMap,
}

impl HochschildCochain {
    pub fn new(a: &AInfStructure, m: &Bimodule, map: MultilinearMap) -> Result<HochschildCochain> {
        check_cochain_shape(a, m, &map)?;
        map.validate().map_err(Error::invalid)?;
        Ok(HochschildCochain { map })
    }

    pub fn arity(&self) -> usize {
        self.map.arity()
    }

    pub fn degree(&self) -> i64 {
        self.map.degree
    }
}

fn check_cochain_shape(a: &AInfStructure, m: &Bimodule, map: &MultilinearMap) -> Result<()> {
    if map.sources.iter().any(|s| *s != a.base) || map.target != m.space {
        return Err(Error::invalid("cochain sources/target do not match the bimodule"));
    }
    Ok(())
}

/// Differential on shifted multilinear maps induced by arity-one
/// differentials on both sides:
/// `δ(x) = d_out ∘ x − (−1)^{|x|} Σ_j x ∘ (1 ⊗ … ⊗ d_in ⊗ … ⊗ 1)`.
pub fn hom_differential(
    d_out: &MultilinearMap,
    d_in: &MultilinearMap,
    x: &MultilinearMap,
) -> MultilinearMap {
    let slots: Vec<MultilinearMap> = (0..x.arity()).map(|_| d_in.clone()).collect();
    hom_differential_mixed(d_out, &slots, x)
}

/// Same differential when the input slots carry different complexes (one
/// arity-one differential per slot, e.g. a module slot among algebra slots).
pub fn hom_differential_mixed(
    d_out: &MultilinearMap,
    d_in: &[MultilinearMap],
    x: &MultilinearMap,
) -> MultilinearMap {
    assert_eq!(d_in.len(), x.arity(), "one inner differential per slot");
    let out = d_out.compose1(x);
    let inner_degree = d_in.first().map_or(d_out.degree, |d| d.degree);
    let mut pre = MultilinearMap::zero(x.sources.clone(), x.target.clone(), x.degree + inner_degree);
    for (j, d) in d_in.iter().enumerate() {
        pre = pre.add(&x.insert(d, j));
    }
    if x.degree.rem_euclid(2) == 0 {
        out.sub(&pre)
    } else {
        out.add(&pre)
    }
}

/// Hochschild differential with coefficients in a bimodule: the commutator
/// with the product, computed on the shifted side where the cochain is a
/// coderivation component. Preserves the internal degree, raises the arity.
pub fn hochschild_delta(
    a: &AInfStructure,
    m: &Bimodule,
    c: &HochschildCochain,
) -> Result<HochschildCochain> {
    check_cochain_shape(a, m, &c.map)?;
    let f = shift_to_bar(&c.map);
    let left_s = shift_to_bar(&m.left);
    let right_s = shift_to_bar(&m.right);
    let b2 = a.b(2);
    let outer = right_s.insert(&f, 0).add(&left_s.insert(&f, 1));
    let mut pre = MultilinearMap::zero(
        vec![a.sa.clone(); f.arity() + 1],
        left_s.target.clone(),
        f.degree + 1,
    );
    for j in 0..f.arity() {
        pre = pre.add(&f.insert(&b2, j));
    }
    let total = if f.degree.rem_euclid(2) == 0 {
        outer.sub(&pre)
    } else {
        outer.add(&pre)
    };
    Ok(HochschildCochain {
        map: unshift_from_bar(&total),
    })
}

/// Whether every insertion of the unit into the cochain vanishes (arity-0
/// cochains are reduced by convention).
pub fn is_reduced(a: &AInfStructure, c: &HochschildCochain) -> Result<bool> {
    let eta = a.unit_const()?;
    for j in 0..c.map.arity() {
        if !c.map.insert(&eta, j).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Basis slots `(word, target index)` for cochains `dom^{⊗arity} → cod` of
/// the given degree; `obj_map` sends source objects into target objects.
pub fn cochain_slots(
    dom: &Space,
    cod: &Space,
    obj_map: &[usize],
    arity: usize,
    degree: i64,
) -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    if arity == 0 {
        for t in 0..cod.dim() {
            if cod.basis[t].degree == degree {
                out.push((Vec::new(), t));
            }
        }
        return out;
    }
    for w in dom.words(arity) {
        let tgt_deg = dom.word_degree(&w) + degree;
        let src_obj = obj_map[dom.basis[w[arity - 1]].src];
        let tgt_obj = obj_map[dom.basis[w[0]].tgt];
        for t in cod.hom_indices(src_obj, tgt_obj) {
            if cod.basis[t].degree == tgt_deg {
                out.push((w.clone(), t));
            }
        }
    }
    out
}

/// The obstruction against extending a truncated structure or morphism by
/// one more component: the prefix extends iff the cycle is a boundary, and
/// any extending component `x` satisfies `δ(x) = -cycle` in the matching
/// complex. Closedness is verified before the cycle is returned.
#[derive(Debug, Clone)]
pub struct ObstructionCycle {
    /// Arity of the missing component.
    pub missing_arity: usize,
    /// The cycle, unshifted. Its own arity is `missing_arity` in the
    /// two-sided-differential setting and `missing_arity + 1` in the
    /// minimal Hochschild setting.
    pub cycle: MultilinearMap,
}

/// Obstruction against extending the operations of arity `≤ n` by an
/// `(n+1)`-st one: the quadratic part of the Stasheff identity at arity
/// `n+1`, a cycle for [`hom_differential`] in `b_1` on both sides.
pub fn obstruction_algebra(a: &AInfStructure, n: usize) -> Result<ObstructionCycle> {
    if n < 1 || n > a.max_arity {
        return Err(Error::invalid(format!(
            "prefix arity {n} outside 1..={}",
            a.max_arity
        )));
    }
    let report = a.check_stasheff_up_to(n);
    if !report.pass {
        return Err(prefix_failure("Stasheff identities on the prefix", &report.residuals));
    }
    let mut cycle = MultilinearMap::zero(vec![a.sa.clone(); n + 1], a.sa.clone(), 2);
    for i in 2..=n {
        let k = n + 2 - i;
        if !(2..=n).contains(&k) {
            continue;
        }
        let outer = a.b(i);
        let inner = a.b(k);
        if outer.is_zero() || inner.is_zero() {
            continue;
        }
        for j in 0..i {
            cycle = cycle.add(&outer.insert(&inner, j));
        }
    }
    let b1 = a.b(1);
    if !hom_differential(&b1, &b1, &cycle).is_zero() {
        return Err(Error::check(
            "obstruction cycle closedness",
            "differential of the quadratic part does not vanish",
        ));
    }
    Ok(ObstructionCycle {
        missing_arity: n + 1,
        cycle: unshift_from_bar(&cycle),
    })
}

/// Obstruction against extending a minimal structure with operations of
/// arity `≤ n` by an `(n+1)`-st one: a Hochschild cycle with diagonal
/// coefficients, of arity `n+2`. The extension must satisfy
/// `hochschild_delta(m_{n+1}) = -cycle`.
pub fn obstruction_minimal(a: &AInfStructure, n: usize) -> Result<ObstructionCycle> {
    if !a.is_minimal() {
        return Err(Error::Unsupported(
            "minimal obstruction requires a vanishing differential".to_string(),
        ));
    }
    if n < 2 || n > a.max_arity {
        return Err(Error::invalid(format!(
            "prefix arity {n} outside 2..={}",
            a.max_arity
        )));
    }
    // For a minimal structure the identities at arities ≤ n+1 constrain the
    // operations of arity ≤ n only.
    let report = a.check_stasheff_up_to(n + 1);
    if !report.pass {
        return Err(prefix_failure("Stasheff identities on the prefix", &report.residuals));
    }
    let mut cycle = MultilinearMap::zero(vec![a.sa.clone(); n + 2], a.sa.clone(), 2);
    for i in 3..=n {
        let k = n + 3 - i;
        if !(3..=n).contains(&k) {
            continue;
        }
        let outer = a.b(i);
        let inner = a.b(k);
        if outer.is_zero() || inner.is_zero() {
            continue;
        }
        for j in 0..i {
            cycle = cycle.add(&outer.insert(&inner, j));
        }
    }
    let unshifted = unshift_from_bar(&cycle);
    let diag = Bimodule::diagonal(a)?;
    let as_cochain = HochschildCochain {
        map: unshifted.clone(),
    };
    if !hochschild_delta(a, &diag, &as_cochain)?.map.is_zero() {
        return Err(Error::check(
            "obstruction cycle closedness",
            "Hochschild differential of the cycle does not vanish",
        ));
    }
    Ok(ObstructionCycle {
        missing_arity: n + 1,
        cycle: unshifted,
    })
}

/// Obstruction against extending a morphism prefix `f_1, …, f_n` (shifted
/// components) between two structures by an `(n+1)`-st component: a cycle
/// for [`hom_differential`] in the two linear parts.
pub fn obstruction_morphism(
    dom: &AInfStructure,
    cod: &AInfStructure,
    comps: &[MultilinearMap],
) -> Result<ObstructionCycle> {
    let n = comps.len();
    if n < 1 {
        return Err(Error::invalid("morphism prefix must contain the linear part"));
    }
    let fam = Family::new(dom.sa.clone(), cod.sa.clone(), comps.to_vec(), 0)?;
    let fc = fam.comps(n);
    for m in 1..=n {
        let res = morphism_residual(dom, cod, &fc, m, 1, 1);
        if let Some((w, _)) = res.first_entry() {
            return Err(Error::check(
                "morphism identities on the prefix",
                format!("arity-{m} residual supported on {w:?}"),
            ));
        }
    }
    // Residual at arity n+1 with the unknown component set to zero; the
    // leftover k = 1 / r = 1 terms vanish with it, leaving minus the cycle.
    let cycle = morphism_residual(dom, cod, &fc, n + 1, 2, 2).neg();
    let d = hom_differential(&cod.b(1), &dom.b(1), &cycle);
    if !d.is_zero() {
        return Err(Error::check(
            "obstruction cycle closedness",
            "differential of the morphism cycle does not vanish",
        ));
    }
    Ok(ObstructionCycle {
        missing_arity: n + 1,
        cycle: unshift_from_bar(&cycle),
    })
}

/// Arity-`m` residual of the morphism identity
/// `Σ f_i ∘ (1 ⊗ b_k ⊗ 1) − Σ b'_r ∘ (f_{i_1} ⊗ … ⊗ f_{i_r})`, with the
/// inner arity restricted to `k ≥ min_k` and the block count to
/// `r ≥ min_r`. Components beyond the supplied prefix are treated as zero.
fn morphism_residual(
    dom: &AInfStructure,
    cod: &AInfStructure,
    fc: &[MultilinearMap],
    m: usize,
    min_k: usize,
    min_r: usize,
) -> MultilinearMap {
    let mut res = MultilinearMap::zero(vec![dom.sa.clone(); m], cod.sa.clone(), 1);
    for k in min_k..=m {
        let i = m + 1 - k;
        if i < 1 || i > fc.len() {
            continue;
        }
        let outer = &fc[i - 1];
        let inner = dom.b(k);
        if outer.is_zero() || inner.is_zero() {
            continue;
        }
        for j in 0..i {
            res = res.add(&outer.insert(&inner, j));
        }
    }
    for r in min_r..=m {
        let op = cod.b(r);
        if op.is_zero() {
            continue;
        }
        for parts in compositions(m, r) {
            if parts.iter().any(|&p| p > fc.len()) {
                continue;
            }
            let blocks: Vec<&MultilinearMap> = parts.iter().map(|&p| &fc[p - 1]).collect();
            if blocks.iter().any(|b| b.is_zero()) {
                continue;
            }
            res = res.sub(&op.compose_blocks(&blocks));
        }
    }
    res
}

fn prefix_failure(what: &str, residuals: &[crate::ainf::ArityCheck]) -> Error {
    let detail = residuals
        .iter()
        .find(|r| !r.ok)
        .map(|r| format!("identity fails at arity {}", r.arity))
        .unwrap_or_else(|| "identity fails".to_string());
    Error::check(what, detail)
}

/// Gauges a minimal, homologically unital structure into a strictly unital
/// one, arity by arity: at each stage a linear system picks a cochain whose
/// Hochschild boundary cancels the unit insertions of the next operation
/// (free coordinates pinned to zero, so the result is deterministic), and
/// the structure is conjugated by the single-component gauge carrying it.
/// Returns the strictly unital structure and the accumulated gauge
/// isomorphism from the input to it.
pub fn strictify_units(a: &AInfStructure) -> Result<(AInfStructure, AInfMorphism)> {
    if !a.is_minimal() {
        return Err(Error::Unsupported(
            "unit strictification requires a minimal structure".to_string(),
        ));
    }
    let report = a.check_units()?;
    if !report.homological {
        return Err(Error::check(
            "homological unitality",
            report
                .homological_witness
                .map(|w| format!("{:?} -> {}", w.word, w.value))
                .unwrap_or_default(),
        ));
    }
    let stasheff = a.check_stasheff();
    if !stasheff.pass {
        return Err(prefix_failure("Stasheff identities", &stasheff.residuals));
    }
    let eta = a.unit_const()?;
    let id = MultilinearMap::identity(&a.base);
    let mul = a.m(2);
    if mul.insert(&eta, 0) != id || mul.insert(&eta, 1) != id {
        return Err(Error::check(
            "strictly unital product",
            "a unit insertion into the product is not the identity",
        ));
    }
    let diag = Bimodule::diagonal(a)?;
    let obj_map: Vec<usize> = (0..a.base.objects.len()).collect();

    let mut cur = a.clone();
    let mut total = AInfMorphism::identity(a);
    for n in 2..cur.max_arity {
        let top = cur.m(n + 1);
        if unit_insertions_vanish(&eta, &top) {
            continue;
        }
        let slots = cochain_slots(&a.base, &a.base, &obj_map, n, 1 - n as i64);
        let mut cols = Vec::with_capacity(slots.len());
        for (w, t) in &slots {
            let mut e = MultilinearMap::zero(vec![a.base.clone(); n], a.base.clone(), 1 - n as i64);
            e.set(w.clone(), vec![(*t, a.base.field.one())]);
            cols.push(hochschild_delta(a, &diag, &HochschildCochain { map: e })?.map);
        }
        let x = solve_unit_insertions(&eta, &cols, &top).ok_or_else(|| {
            Error::check(
                "unit strictification solvability",
                format!("no gauge cochain cancels the unit insertions at arity {}", n + 1),
            )
        })?;
        let f_n = assemble_from_slots(
            vec![a.base.clone(); n],
            a.base.clone(),
            1 - n as i64,
            &slots,
            &x,
        );
        // A single-component gauge subtracts the Hochschild boundary of its
        // component from the next operation and fixes everything below, so
        // conjugating by f_n cancels the unit insertions there.
        let mut fam = vec![MultilinearMap::identity(&cur.sa)];
        for k in 2..n {
            fam.push(MultilinearMap::zero(vec![cur.sa.clone(); k], cur.sa.clone(), 0));
        }
        fam.push(shift_to_bar(&f_n));
        let next = cur.gauge_transform(&fam)?;
        for i in 1..=n {
            if next.b(i) != cur.b(i) {
                return Err(Error::check(
                    "gauge fixes the operations below the stage",
                    format!("operation of arity {i} moved at stage {n}"),
                ));
            }
        }
        if !unit_insertions_vanish(&eta, &next.m(n + 1)) {
            return Err(Error::check(
                "gauge cancels the unit insertions",
                format!("arity {} still has unit insertions after gauging", n + 1),
            ));
        }
        let stage = AInfMorphism::new(cur.clone(), next.clone(), fam, None)?;
        total = stage.compose(&total)?;
        cur = next;
    }
    let final_report = cur.check_units()?;
    if !final_report.strict {
        return Err(Error::check(
            "strict unitality of the gauged structure",
            final_report
                .strict_witness
                .map(|w| format!("{:?} -> {}", w.word, w.value))
                .unwrap_or_default(),
        ));
    }
    if !total.check_morphism().pass {
        return Err(Error::check(
            "accumulated gauge is a morphism",
            "morphism identities fail for the accumulated gauge",
        ));
    }
    Ok((cur, total))
}

/// Deforms a morphism between strictly unital minimal structures into a
/// strictly unitary one, homotopic to the input: at each stage a linear
/// system picks the next homotopy component so that the deformation of the
/// original morphism along the whole family has vanishing unit insertions
/// one arity higher. Returns the strictly unitary morphism together with
/// the verified homotopy from the input to it.
pub fn strictify_morphism(f: &AInfMorphism) -> Result<(AInfMorphism, Homotopy)> {
    for (side, s) in [("domain", &f.dom), ("codomain", &f.cod)] {
        if !s.is_minimal() {
            return Err(Error::Unsupported(format!(
                "morphism strictification requires a minimal {side}"
            )));
        }
        let report = s.check_units()?;
        if !report.strict {
            return Err(Error::check(
                format!("strictly unital {side}"),
                report
                    .strict_witness
                    .map(|w| format!("{:?} -> {}", w.word, w.value))
                    .unwrap_or_default(),
            ));
        }
    }
    if !f.check_morphism().pass {
        return Err(Error::check(
            "morphism identities on the input",
            "the input does not satisfy the morphism identities",
        ));
    }
    let eta_dom = f.dom.unit_const()?;
    let eta_cod = f.cod.unit_const()?;
    if f.f_unshifted(1).insert(&eta_dom, 0) != eta_cod {
        return Err(Error::check(
            "linear part preserves the unit",
            "f_1(unit) differs from the unit",
        ));
    }
    let nmax = f.max_arity();
    let mut hcomps: Vec<MultilinearMap> = Vec::new();
    for n in 1..nmax {
        hcomps.push(MultilinearMap::zero(
            vec![f.dom.sa.clone(); n],
            f.cod.sa.clone(),
            -1,
        ));
        let (g0, _) = deform_by_homotopy(f, hcomps.clone())?;
        let base = g0.f_unshifted(n + 1);
        if unit_insertions_vanish(&eta_dom, &base) {
            continue;
        }
        let slots = cochain_slots(&f.dom.base, &f.cod.base, &f.obj_map, n, -(n as i64));
        let mut cols = Vec::with_capacity(slots.len());
        for (w, t) in &slots {
            let mut e = MultilinearMap::zero(
                vec![f.dom.base.clone(); n],
                f.cod.base.clone(),
                -(n as i64),
            );
            e.set(w.clone(), vec![(*t, f.dom.base.field.one())]);
            let mut trial = hcomps.clone();
            *trial.last_mut().expect("stage component") = shift_to_bar(&e);
            let (ge, _) = deform_by_homotopy(f, trial)?;
            cols.push(ge.f_unshifted(n + 1).sub(&base));
        }
        let x = solve_unit_insertions(&eta_dom, &cols, &base.neg()).ok_or_else(|| {
            Error::check(
                "morphism strictification solvability",
                format!("no homotopy component cancels the unit insertions at arity {}", n + 1),
            )
        })?;
        let h_n = assemble_from_slots(
            vec![f.dom.base.clone(); n],
            f.cod.base.clone(),
            -(n as i64),
            &slots,
            &x,
        );
        *hcomps.last_mut().expect("stage component") = shift_to_bar(&h_n);
        let (g, _) = deform_by_homotopy(f, hcomps.clone())?;
        if !unit_insertions_vanish(&eta_dom, &g.f_unshifted(n + 1)) {
            return Err(Error::check(
                "homotopy cancels the unit insertions",
                format!("arity {} still has unit insertions after deforming", n + 1),
            ));
        }
    }
    let (g, homotopy) = deform_by_homotopy(f, hcomps)?;
    if !g.check_morphism().pass {
        return Err(Error::check(
            "morphism identities on the deformation",
            "the deformed morphism fails the morphism identities",
        ));
    }
    if !g.check_unital()?.pass {
        return Err(Error::check(
            "strict unitarity of the deformation",
            "the deformed morphism is not strictly unitary",
        ));
    }
    if !homotopy.check_homotopy().pass {
        return Err(Error::check(
            "homotopy relation",
            "the homotopy relation fails for the accumulated family",
        ));
    }
    Ok((g, homotopy))
}

fn unit_insertions_vanish(eta: &MultilinearMap, map: &MultilinearMap) -> bool {
    (0..map.arity()).all(|j| map.insert(eta, j).is_zero())
}

/// Solves `Σ_s x_s · cols[s] = rhs` on every unit insertion, by row
/// reduction with free coordinates pinned to zero.
fn solve_unit_insertions(
    eta: &MultilinearMap,
    cols: &[MultilinearMap],
    rhs: &MultilinearMap,
) -> Option<Sv> {
    let collect = |map: &MultilinearMap| {
        let mut out = Vec::new();
        for p in 0..map.arity() {
            let ins = map.insert(eta, p);
            for (word, sv) in ins.entries() {
                for (o, c) in sv {
                    out.push(((p, word.clone(), *o), c.clone()));
                }
            }
        }
        out
    };
    let rhs_entries = collect(rhs);
    let col_entries: Vec<_> = cols.iter().map(collect).collect();
    let mut keys: BTreeSet<(usize, Vec<usize>, usize)> = BTreeSet::new();
    for (k, _) in &rhs_entries {
        keys.insert(k.clone());
    }
    for entries in &col_entries {
        for (k, _) in entries {
            keys.insert(k.clone());
        }
    }
    let index: BTreeMap<_, usize> = keys.into_iter().zip(0..).collect();
    let field = rhs.target.field;
    let mut mat = Mat::zero(field, index.len(), cols.len());
    for (s, entries) in col_entries.iter().enumerate() {
        for (k, c) in entries {
            mat.set(index[k], s, c.clone());
        }
    }
    let mut b: Sv = rhs_entries
        .iter()
        .map(|(k, c)| (index[k], c.clone()))
        .collect();
    b.sort_by_key(|(i, _)| *i);
    solve(&mat, &b)
}

fn assemble_from_slots(
    sources: Vec<Space>,
    target: Space,
    degree: i64,
    slots: &[(Vec<usize>, usize)],
    x: &Sv,
) -> MultilinearMap {
    let mut by_word: BTreeMap<Vec<usize>, Sv> = BTreeMap::new();
    for (s, c) in x {
        let (word, t) = &slots[*s];
        by_word.entry(word.clone()).or_default().push((*t, c.clone()));
    }
    let mut out = MultilinearMap::zero(sources, target, degree);
    for (word, sv) in by_word {
        out.set(word, crate::graded::sv_normalize(sv));
    }
    out
}
