//! Sparse multilinear maps between graded spaces, and the *only* two places
//! in the crate where graded signs are produced:
//!
//! * [`koszul_sign`] — the Koszul commutation rule `(-1)^{|f|·|x|}` applied
//!   whenever a graded map moves past graded inputs, and
//! * [`shift_to_bar`] / [`unshift_from_bar`] — the suspension bijection
//!   between operations on a space and operations on its shift.
//!
//! Every other construction (insertions, tensor blocks, bar differentials,
//! transfer trees, twists, …) composes these primitives and is sign-free on
//! the shifted side.

use crate::field::K;
use crate::graded::{sv_normalize, Space, Sv};
use std::collections::BTreeMap;

/// `(-1)^{map_degree · Σ passed_degrees}`: the sign produced when a map of
/// the given degree is moved past elements of the given degrees.
pub fn koszul_sign(map_degree: i64, passed_degrees: &[i64]) -> i64 {
    let s: i64 = passed_degrees.iter().sum();
    if (map_degree * s) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A degree-homogeneous multilinear map `sources[0] ⊗ … ⊗ sources[n-1] →
/// target`, stored sparsely as `input word → output vector`. Words index the
/// source bases positionwise; entries with zero output are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearMap {
    pub sources: Vec<Space>,
    pub target: Space,
    pub degree: i64,
    entries: BTreeMap<Vec<usize>, Sv>,
}

impl MultilinearMap {
    pub fn zero(sources: Vec<Space>, target: Space, degree: i64) -> MultilinearMap {
        MultilinearMap {
            sources,
            target,
            degree,
            entries: BTreeMap::new(),
        }
    }

    /// The identity map of a space (arity 1, degree 0).
    pub fn identity(space: &Space) -> MultilinearMap {
        let mut entries = BTreeMap::new();
        for i in 0..space.dim() {
            entries.insert(vec![i], vec![(i, space.field.one())]);
        }
        MultilinearMap {
            sources: vec![space.clone()],
            target: space.clone(),
            degree: 0,
            entries,
        }
    }

    /// The degree `-k` isomorphism `V → S^k V` sending each basis vector to
    /// its suspended copy (for `k = 1` this is the suspension map `s`).
    pub fn susp(space: &Space, k: i64) -> MultilinearMap {
        let target = space.suspend(k);
        let mut entries = BTreeMap::new();
        for i in 0..space.dim() {
            entries.insert(vec![i], vec![(i, space.field.one())]);
        }
        MultilinearMap {
            sources: vec![space.clone()],
            target,
            degree: -k,
            entries,
        }
    }

    /// The degree `+k` isomorphism `S^k V → V` (for `k = 1`: `ω = s^{-1}`).
    pub fn susp_inverse(space: &Space, k: i64) -> MultilinearMap {
        let source = space.suspend(k);
        let mut entries = BTreeMap::new();
        for i in 0..space.dim() {
            entries.insert(vec![i], vec![(i, space.field.one())]);
        }
        MultilinearMap {
            sources: vec![source],
            target: space.clone(),
            degree: k,
            entries,
        }
    }

    pub fn arity(&self) -> usize {
        self.sources.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Sv)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// First stored entry in lexicographic word order, if any — used for
    /// deterministic failure witnesses.
    pub fn first_entry(&self) -> Option<(&Vec<usize>, &Sv)> {
        self.entries.iter().next()
    }

    /// Sets the image of a basis word (replacing any previous value).
    pub fn set(&mut self, word: Vec<usize>, value: Sv) {
        assert_eq!(word.len(), self.arity(), "word length != arity");
        let value = sv_normalize(value);
        if value.is_empty() {
            self.entries.remove(&word);
        } else {
            self.entries.insert(word, value);
        }
    }

    /// Adds to the image of a basis word.
    pub fn add_to(&mut self, word: Vec<usize>, value: Sv) {
        let mut cur = self.entries.remove(&word).unwrap_or_default();
        cur.extend(value);
        self.set(word, cur);
    }

    pub fn eval_word(&self, word: &[usize]) -> Sv {
        self.entries.get(word).cloned().unwrap_or_default()
    }

    /// Applies the map to a tensor of sparse vectors (multilinear extension).
    pub fn eval_tensor(&self, factors: &[&Sv]) -> Sv {
        assert_eq!(factors.len(), self.arity());
        let mut acc: Vec<(usize, K)> = Vec::new();
        let mut word = vec![0usize; factors.len()];
        let one = self.target.field.one();
        self.eval_tensor_rec(factors, 0, &mut word, &one, &mut acc);
        sv_normalize(acc)
    }

    fn eval_tensor_rec(
        &self,
        factors: &[&Sv],
        pos: usize,
        word: &mut Vec<usize>,
        coeff: &K,
        acc: &mut Vec<(usize, K)>,
    ) {
        if pos == factors.len() {
            for (out, c) in self.eval_word(word) {
                acc.push((out, c.mul(coeff)));
            }
            return;
        }
        for (i, c) in factors[pos] {
            word[pos] = *i;
            self.eval_tensor_rec(factors, pos + 1, word, &coeff.mul(c), acc);
        }
    }

    /// Degree-homogeneity validation: every stored entry must satisfy
    /// `deg(output) = Σ deg(inputs) + deg(map)`.
    pub fn validate(&self) -> Result<(), String> {
        for (word, sv) in &self.entries {
            if word.len() != self.arity() {
                return Err(format!("entry word {word:?} has wrong arity"));
            }
            let mut in_deg = 0;
            for (pos, &i) in word.iter().enumerate() {
                if i >= self.sources[pos].dim() {
                    return Err(format!("entry word {word:?} out of range at slot {pos}"));
                }
                in_deg += self.sources[pos].degree(i);
            }
            for (out, c) in sv {
                if *out >= self.target.dim() {
                    return Err(format!("entry output {out} out of range"));
                }
                if c.is_zero() {
                    return Err(format!("stored zero coefficient at {word:?}"));
                }
                if self.target.degree(*out) != in_deg + self.degree {
                    return Err(format!(
                        "entry {word:?} -> basis {out} violates degree homogeneity \
                         (inputs {in_deg} + map {} != output {})",
                        self.degree,
                        self.target.degree(*out)
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, rhs: &MultilinearMap) -> MultilinearMap {
        assert_eq!(self.sources, rhs.sources, "source mismatch in add");
        assert_eq!(self.target, rhs.target, "target mismatch in add");
        assert_eq!(self.degree, rhs.degree, "degree mismatch in add");
        let mut out = self.clone();
        for (w, sv) in &rhs.entries {
            out.add_to(w.clone(), sv.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &MultilinearMap) -> MultilinearMap {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> MultilinearMap {
        self.scale_sign(-1)
    }

    pub fn scale(&self, c: &K) -> MultilinearMap {
        let mut out = MultilinearMap::zero(self.sources.clone(), self.target.clone(), self.degree);
        if c.is_zero() {
            return out;
        }
        for (w, sv) in &self.entries {
            out.entries
                .insert(w.clone(), sv.iter().map(|(i, x)| (*i, x.mul(c))).collect());
        }
        out
    }

    /// Scales by `+1` or `-1`.
    pub fn scale_sign(&self, sign: i64) -> MultilinearMap {
        match sign {
            1 => self.clone(),
            -1 => {
                let mut out =
                    MultilinearMap::zero(self.sources.clone(), self.target.clone(), self.degree);
                for (w, sv) in &self.entries {
                    out.entries
                        .insert(w.clone(), sv.iter().map(|(i, x)| (*i, x.neg())).collect());
                }
                out
            }
            _ => panic!("sign must be 1 or -1"),
        }
    }

    /// The composition `self ∘ (1^{⊗j} ⊗ inner ⊗ 1^{⊗l})` where `inner` is
    /// substituted into slot `j`. The Koszul rule applies: `inner` moves past
    /// the first `j` inputs.
    pub fn insert(&self, inner: &MultilinearMap, j: usize) -> MultilinearMap {
        assert!(j < self.arity(), "insertion slot out of range");
        assert_eq!(
            self.sources[j], inner.target,
            "inner target does not match outer slot"
        );
        let mut sources = Vec::with_capacity(self.arity() + inner.arity() - 1);
        sources.extend_from_slice(&self.sources[..j]);
        sources.extend_from_slice(&inner.sources);
        sources.extend_from_slice(&self.sources[j + 1..]);
        let mut out =
            MultilinearMap::zero(sources, self.target.clone(), self.degree + inner.degree);

        for (outer_word, outer_sv) in &self.entries {
            let mid = outer_word[j];
            let prefix_degrees: Vec<i64> = outer_word[..j]
                .iter()
                .enumerate()
                .map(|(pos, &i)| self.sources[pos].degree(i))
                .collect();
            let sign = koszul_sign(inner.degree, &prefix_degrees);
            for (inner_word, inner_sv) in &inner.entries {
                let Some((_, c_in)) = inner_sv.iter().find(|(o, _)| *o == mid) else {
                    continue;
                };
                let mut word = Vec::with_capacity(outer_word.len() + inner_word.len() - 1);
                word.extend_from_slice(&outer_word[..j]);
                word.extend_from_slice(inner_word);
                word.extend_from_slice(&outer_word[j + 1..]);
                let c = c_in.with_sign(sign);
                out.add_to(
                    word,
                    outer_sv.iter().map(|(o, x)| (*o, x.mul(&c))).collect(),
                );
            }
        }
        out
    }

    /// The composition `self ∘ (g_1 ⊗ … ⊗ g_r)` where `r = self.arity()`.
    /// Koszul rule: `g_t` moves past the inputs of `g_1, …, g_{t-1}`.
    pub fn compose_blocks(&self, inners: &[&MultilinearMap]) -> MultilinearMap {
        assert_eq!(inners.len(), self.arity(), "block count != arity");
        for (t, g) in inners.iter().enumerate() {
            assert_eq!(
                self.sources[t], g.target,
                "block {t} target does not match outer slot"
            );
        }
        let mut sources = Vec::new();
        for g in inners {
            sources.extend_from_slice(&g.sources);
        }
        let total_degree = self.degree + inners.iter().map(|g| g.degree).sum::<i64>();
        let mut out = MultilinearMap::zero(sources, self.target.clone(), total_degree);

        let entry_lists: Vec<Vec<(&Vec<usize>, &Sv)>> =
            inners.iter().map(|g| g.entries.iter().collect()).collect();
        if entry_lists.iter().any(|l| l.is_empty()) {
            return out;
        }
        let mut choice = vec![0usize; inners.len()];
        loop {
            // Sign: block t (degree |g_t|) moves past the concatenated inputs
            // of blocks 1..t; then assemble the concatenated input word.
            let mut sign = 1i64;
            let mut passed: Vec<i64> = Vec::new();
            let mut word: Vec<usize> = Vec::new();
            for (t, g) in inners.iter().enumerate() {
                let (w, _) = entry_lists[t][choice[t]];
                sign *= koszul_sign(g.degree, &passed);
                for (pos, &i) in w.iter().enumerate() {
                    passed.push(g.sources[pos].degree(i));
                }
                word.extend_from_slice(w);
            }
            let coeff = self.target.field.one().with_sign(sign);
            let mut mid_word = Vec::with_capacity(inners.len());
            self.expand_block_outputs(&entry_lists, &choice, 0, &mut mid_word, &coeff, &word, &mut out);

            // Advance the multi-index over entry choices.
            let mut t = inners.len();
            loop {
                if t == 0 {
                    return out;
                }
                t -= 1;
                choice[t] += 1;
                if choice[t] < entry_lists[t].len() {
                    break;
                }
                choice[t] = 0;
            }
        }
    }

    fn expand_block_outputs(
        &self,
        entry_lists: &[Vec<(&Vec<usize>, &Sv)>],
        choice: &[usize],
        t: usize,
        mid_word: &mut Vec<usize>,
        coeff: &K,
        word: &[usize],
        out: &mut MultilinearMap,
    ) {
        if t == entry_lists.len() {
            for (o, c) in self.eval_word(mid_word) {
                out.add_to(word.to_vec(), vec![(o, c.mul(coeff))]);
            }
            return;
        }
        let (_, sv) = entry_lists[t][choice[t]];
        for (m, c) in sv.iter() {
            mid_word.push(*m);
            self.expand_block_outputs(entry_lists, choice, t + 1, mid_word, &coeff.mul(c), word, out);
            mid_word.pop();
        }
    }

    /// Arity-1 post-composition `self ∘ g` (no Koszul sign can arise).
    pub fn compose1(&self, g: &MultilinearMap) -> MultilinearMap {
        assert_eq!(self.arity(), 1);
        self.insert(g, 0)
    }
}

/// The suspension bijection for operations. An arity-`n` map
/// `f: A_1 ⊗ … ⊗ A_n → B` of degree `d` corresponds to
/// `F = (-1)^{d+n-1} s ∘ f ∘ ω^{⊗n} : SA_1 ⊗ … ⊗ SA_n → SB`
/// of degree `d + n - 1`; the sign is the one for which the defining identity
/// `ω ∘ F = (-1)^{|F|} f ∘ ω^{⊗n}` holds. Coefficientwise:
/// `F(s x_1, …, s x_n) = (-1)^{d+n-1} κ(x) · s f(x_1, …, x_n)` with
/// `κ(x) = (-1)^{Σ_u (n-u)(|x_u|-1)}` coming from evaluating `ω^{⊗n}`.
///
/// Structure maps `m_i` (degree `2-i`) become degree `+1` maps, morphism
/// components `f_i` (degree `1-i`) become degree `0` maps, homotopy
/// components `h_i` (degree `-i`) become degree `-1` maps; the same bijection
/// covers module and bimodule operations (all slots suspended).
pub fn shift_to_bar(f: &MultilinearMap) -> MultilinearMap {
    shift_like(f, true)
}

/// Inverse of [`shift_to_bar`]; the round trip is the identity on the nose.
pub fn unshift_from_bar(bar: &MultilinearMap) -> MultilinearMap {
    shift_like(bar, false)
}

fn shift_like(f: &MultilinearMap, to_bar: bool) -> MultilinearMap {
    let n = f.arity() as i64;
    let shift = if to_bar { 1 } else { -1 };
    let sources: Vec<Space> = f.sources.iter().map(|s| s.suspend(shift)).collect();
    let target = f.target.suspend(shift);
    let new_degree = f.degree + (n - 1) * shift;
    // The global sign uses the *unshifted* degree and arity: (-1)^{d+n-1}.
    let d_unshifted = if to_bar { f.degree } else { new_degree };
    let global = if (d_unshifted + n - 1).rem_euclid(2) == 0 {
        1
    } else {
        -1
    };
    let mut out = MultilinearMap::zero(sources, target, new_degree);
    for (word, sv) in &f.entries {
        // κ uses unshifted input degrees.
        let mut exp = 0i64;
        for (pos, &i) in word.iter().enumerate() {
            let unshifted_deg = if to_bar {
                f.sources[pos].degree(i)
            } else {
                f.sources[pos].degree(i) + 1
            };
            exp += (n - 1 - pos as i64) * (unshifted_deg - 1);
        }
        let kappa = if exp.rem_euclid(2) == 0 { 1 } else { -1 };
        let sign = global * kappa;
        out.set(
            word.clone(),
            sv.iter().map(|(o, c)| (*o, c.with_sign(sign))).collect(),
        );
    }
    out
}

/// Enumerates all words in the cartesian product of the source bases
/// (lexicographic). Intended for small verification sweeps.
pub fn cartesian_words(sources: &[Space]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for s in sources {
        let mut next = Vec::with_capacity(out.len() * s.dim());
        for w in &out {
            for i in 0..s.dim() {
                let mut w2 = w.clone();
                w2.push(i);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}
