//! The deletion calculus: the logarithmic hairpin predicate, single-step
//! deletion, parallel and maximally parallel deletion, and terminating
//! deletion over circular words.
//!
//! A deletable region factorizes as `α x ℓ θ(x)θ(α) z β` for a context pair
//! `(α, β)`: the stem `αx` pairs with its involution image around the loop
//! `ℓ`, at most `margin` symbols `z` may sit between the paired block and the
//! right context, and the stem must be long enough for the loop under the
//! logarithmic predicate. Removing the region from `w_p α x ℓ θ(x)θ(α) z β
//! w_s` leaves `w_p w_s`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::words::{
    apply_involution, occurrences_in, Alphabet, CircularWord, Involution, Sym, Word, WordError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HairpinError {
    #[error("log factor must be at least 1")]
    ZeroLogFactor,
    #[error("context components must be nonempty")]
    EmptyContextComponent,
    #[error("terminating sequences must be nonempty words")]
    EmptyTerminator,
    #[error("terminating stem length must be at least 1 when terminators are present")]
    ZeroStemLen,
    #[error("params have no terminators; circular deletion requires a nonempty T")]
    NoTerminators,
    #[error("bounds must be at least 1")]
    ZeroBound,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Whether a stem of `stem_len` symbols supports a loop of `loop_len` symbols
/// under log factor `c`, i.e. `stem_len ≥ c·log₂(loop_len)`.
///
/// Loops of length 0 or 1 always pass (`log₂(1) = 0`). The comparison is the
/// exact integer test `2^stem_len ≥ loop_len^c`, never floating point.
pub fn log_hairpin_ok(stem_len: usize, loop_len: usize, c: u32) -> bool {
    if loop_len <= 1 || c == 0 {
        return true;
    }
    if c == 1 {
        return stem_len >= 64 || (loop_len as u128) <= (1u128 << stem_len);
    }
    let bits = (128 - (loop_len as u128).leading_zeros()) as u64; // loop < 2^bits ≤ 2·loop
    if bits * c as u64 <= stem_len as u64 {
        return true;
    }
    if (bits - 1) * c as u64 > stem_len as u64 {
        return false;
    }
    use num_bigint::BigUint;
    BigUint::from(loop_len).pow(c) <= (BigUint::from(1u8) << stem_len)
}

/// A finite set of `(left, right)` context pairs, both components nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextSet {
    pairs: Vec<(Word, Word)>,
}

impl ContextSet {
    pub fn new(pairs: Vec<(Word, Word)>) -> Result<ContextSet, HairpinError> {
        for (l, r) in &pairs {
            if l.is_empty() || r.is_empty() {
                return Err(HairpinError::EmptyContextComponent);
            }
        }
        Ok(ContextSet { pairs })
    }

    pub fn pairs(&self) -> &[(Word, Word)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, i: usize) -> &(Word, Word) {
        &self.pairs[i]
    }
}

/// The parameter tuple for log-hairpin deletion: alphabet, involution, log
/// factor, contexts, margin, and (for circular words) terminating sequences
/// with the terminating stem length.
#[derive(Clone, Debug)]
pub struct DeletionParams {
    pub alphabet: Alphabet,
    pub theta: Involution,
    pub log_factor: u32,
    pub contexts: ContextSet,
    pub margin: usize,
    pub terminators: Vec<Word>,
    pub term_stem_len: usize,
    /// Minimum loop length for a hairpin to count. Defaults to 0; real
    /// hairpins would want 3.
    pub min_loop: usize,
}

impl DeletionParams {
    pub fn new(
        alphabet: Alphabet,
        theta: Involution,
        log_factor: u32,
        contexts: ContextSet,
        margin: usize,
    ) -> Result<DeletionParams, HairpinError> {
        if log_factor == 0 {
            return Err(HairpinError::ZeroLogFactor);
        }
        if theta.alphabet() != &alphabet {
            return Err(HairpinError::Word(WordError::AlphabetMismatch));
        }
        for (l, r) in contexts.pairs() {
            if l.alphabet() != &alphabet || r.alphabet() != &alphabet {
                return Err(HairpinError::Word(WordError::AlphabetMismatch));
            }
        }
        Ok(DeletionParams {
            alphabet,
            theta,
            log_factor,
            contexts,
            margin,
            terminators: Vec::new(),
            term_stem_len: 0,
            min_loop: 0,
        })
    }

    /// Adds the terminating sequences `T` and terminating stem length `m`.
    pub fn with_termination(
        mut self,
        terminators: Vec<Word>,
        stem_len: usize,
    ) -> Result<DeletionParams, HairpinError> {
        if terminators.iter().any(|t| t.is_empty()) {
            return Err(HairpinError::EmptyTerminator);
        }
        if !terminators.is_empty() && stem_len == 0 {
            return Err(HairpinError::ZeroStemLen);
        }
        self.terminators = terminators;
        self.term_stem_len = stem_len;
        Ok(self)
    }

    pub fn with_min_loop(mut self, min_loop: usize) -> DeletionParams {
        self.min_loop = min_loop;
        self
    }
}

/// One factorization `w = w_p α x ℓ θ(x)θ(α) z β w_s`. Offsets are relative
/// to the word the occurrence was found in; `prefix_len` is the start of `α`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HairpinOccurrence {
    pub prefix_len: usize,
    pub ctx_index: usize,
    pub alpha_len: usize,
    pub stem_ext_len: usize,
    pub loop_len: usize,
    pub margin_len: usize,
    pub beta_len: usize,
}

impl HairpinOccurrence {
    /// Total length of the deleted region `α x ℓ θ(x)θ(α) z β`.
    pub fn region_len(&self) -> usize {
        2 * (self.alpha_len + self.stem_ext_len)
            + self.loop_len
            + self.margin_len
            + self.beta_len
    }

    /// `[start, end)` of the deleted region.
    pub fn region_bounds(&self) -> (usize, usize) {
        (self.prefix_len, self.prefix_len + self.region_len())
    }

    /// The eight cut points `w_p | α | x | ℓ | θ(x)θ(α) | z | β | w_s` as
    /// offsets (first is 0 implicitly; returns the seven interior cuts plus
    /// the region end).
    pub fn cuts(&self) -> [usize; 7] {
        let a0 = self.prefix_len;
        let x0 = a0 + self.alpha_len;
        let l0 = x0 + self.stem_ext_len;
        let t0 = l0 + self.loop_len;
        let z0 = t0 + self.stem_ext_len + self.alpha_len;
        let b0 = z0 + self.margin_len;
        let end = b0 + self.beta_len;
        [a0, x0, l0, t0, z0, b0, end]
    }

    /// The named pieces of the factorization, sliced out of `w`.
    pub fn segments(&self, w: &Word) -> HairpinSegments {
        let [a0, x0, l0, t0, z0, b0, end] = self.cuts();
        HairpinSegments {
            prefix: w.slice(0, a0),
            alpha: w.slice(a0, x0),
            stem_ext: w.slice(x0, l0),
            lop: w.slice(l0, t0),
            theta_block: w.slice(t0, z0),
            margin: w.slice(z0, b0),
            beta: w.slice(b0, end),
            suffix: w.slice(end, w.len()),
        }
    }
}

/// The pieces `w_p, α, x, ℓ, θ(x)θ(α), z, β, w_s` of a factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HairpinSegments {
    pub prefix: Word,
    pub alpha: Word,
    pub stem_ext: Word,
    pub lop: Word,
    pub theta_block: Word,
    pub margin: Word,
    pub beta: Word,
    pub suffix: Word,
}

/// Context occurrence data precomputed over one symbol buffer.
struct Scan<'a> {
    buf: &'a [Sym],
    params: &'a DeletionParams,
    /// Occurrence positions of each θ(α), ascending.
    theta_starts: Vec<Vec<usize>>,
    /// Occurrence positions of each α, ascending.
    alpha_starts: Vec<Vec<usize>>,
}

impl<'a> Scan<'a> {
    fn new(buf: &'a [Sym], params: &'a DeletionParams) -> Scan<'a> {
        let mut theta_starts = Vec::new();
        let mut alpha_starts = Vec::new();
        for (l, _) in params.contexts.pairs() {
            let ta: Vec<Sym> = l
                .syms()
                .iter()
                .rev()
                .map(|&s| params.theta.apply_sym(s))
                .collect();
            theta_starts.push(occurrences_in(&ta, buf));
            alpha_starts.push(occurrences_in(l.syms(), buf));
        }
        Scan {
            buf,
            params,
            theta_starts,
            alpha_starts,
        }
    }

    /// All occurrences with `α` starting at `a_start` for context `ci`.
    fn occurrences_at(&self, ci: usize, a_start: usize, out: &mut Vec<HairpinOccurrence>) {
        let (alpha, beta) = self.params.contexts.get(ci);
        let alpha_len = alpha.len();
        let a_end = a_start + alpha_len;
        let beta = beta.syms();
        let theta = &self.params.theta;
        for &q in &self.theta_starts[ci] {
            if q < a_end {
                continue;
            }
            // longest stem extension x with buf[a_end+i] pairing buf[q-1-i];
            // the halves [a_end, a_end+x) and [q-x, q) must stay disjoint
            let mut run = 0usize;
            while 2 * (run + 1) <= q - a_end
                && theta.apply_sym(self.buf[a_end + run]) == self.buf[q - 1 - run]
            {
                run += 1;
            }
            let theta_end = q + alpha_len;
            for xl in 0..=run {
                let loop_len = q - a_end - 2 * xl;
                if loop_len < self.params.min_loop {
                    continue;
                }
                if !log_hairpin_ok(alpha_len + xl, loop_len, self.params.log_factor) {
                    continue;
                }
                for zl in 0..=self.params.margin {
                    let b0 = theta_end + zl;
                    if b0 + beta.len() > self.buf.len() {
                        break;
                    }
                    if &self.buf[b0..b0 + beta.len()] == beta {
                        out.push(HairpinOccurrence {
                            prefix_len: a_start,
                            ctx_index: ci,
                            alpha_len,
                            stem_ext_len: xl,
                            loop_len,
                            margin_len: zl,
                            beta_len: beta.len(),
                        });
                    }
                }
            }
        }
    }

    /// Every occurrence anywhere in the buffer, in the deterministic order
    /// (region start, stem length, margin, loop, context index).
    fn all_occurrences(&self) -> Vec<HairpinOccurrence> {
        let mut out = Vec::new();
        for ci in 0..self.params.contexts.len() {
            for &a in &self.alpha_starts[ci] {
                self.occurrences_at(ci, a, &mut out);
            }
        }
        out.sort_by_key(|o| {
            (
                o.prefix_len,
                o.alpha_len + o.stem_ext_len,
                o.margin_len,
                o.loop_len,
                o.ctx_index,
            )
        });
        out
    }

    /// Full deletable regions starting at each position: `regions[p]` holds
    /// `(end, occurrence)` for every region `[p, end)` with `α` at `p` and
    /// `β` flush with the end.
    fn regions_by_start(&self) -> Vec<Vec<(usize, HairpinOccurrence)>> {
        let mut regions: Vec<Vec<(usize, HairpinOccurrence)>> =
            vec![Vec::new(); self.buf.len() + 1];
        let mut scratch = Vec::new();
        for ci in 0..self.params.contexts.len() {
            for &a in &self.alpha_starts[ci] {
                scratch.clear();
                self.occurrences_at(ci, a, &mut scratch);
                for occ in &scratch {
                    let (s, e) = occ.region_bounds();
                    regions[s].push((e, occ.clone()));
                }
            }
        }
        for list in &mut regions {
            list.sort_by_key(|(e, o)| {
                (
                    *e,
                    o.alpha_len + o.stem_ext_len,
                    o.margin_len,
                    o.loop_len,
                    o.ctx_index,
                )
            });
        }
        regions
    }

    /// `cover[p]` = least end of a left-context occurrence starting at `p`
    /// (`usize::MAX` if none). A span `[i, j)` contains a left context iff
    /// `min_{p in [i,j)} cover[p] ≤ j`.
    fn left_cover(&self) -> Vec<usize> {
        let mut cover = vec![usize::MAX; self.buf.len() + 1];
        for ci in 0..self.params.contexts.len() {
            let len = self.params.contexts.get(ci).0.len();
            for &p in &self.alpha_starts[ci] {
                cover[p] = cover[p].min(p + len);
            }
        }
        cover
    }

    /// `step[p]` = least end of a full deletable region starting at `p`.
    fn region_cover(regions: &[Vec<(usize, HairpinOccurrence)>]) -> Vec<usize> {
        regions
            .iter()
            .map(|l| l.first().map_or(usize::MAX, |(e, _)| *e))
            .collect()
    }
}

/// Every factorization of `w` admitting a single deletion step, exhaustively,
/// in a deterministic order (by region start, then stem length, then margin).
pub fn find_hairpin_occurrences(w: &Word, params: &DeletionParams) -> Vec<HairpinOccurrence> {
    Scan::new(w.syms(), params).all_occurrences()
}

/// The words obtainable from `w` by one deletion step, deduplicated.
pub fn delete_step(w: &Word, params: &DeletionParams) -> BTreeSet<Word> {
    delete_step_traced(w, params).into_keys().collect()
}

/// Like [`delete_step`], keeping one witnessing trace per result.
pub fn delete_step_traced(w: &Word, params: &DeletionParams) -> BTreeMap<Word, DeletionTrace> {
    let mut out = BTreeMap::new();
    for occ in find_hairpin_occurrences(w, params) {
        let (s, e) = occ.region_bounds();
        let result = w.slice(0, s).concat(&w.slice(e, w.len()));
        out.entry(result.clone()).or_insert_with(|| DeletionTrace {
            input: TraceInput::Linear(w.clone()),
            steps: vec![occ],
            output: result,
            termination: None,
        });
    }
    out
}

/// True iff some single step deletes `w` entirely (`w_p = w_s = ε`).
pub fn deletable_to_empty(w: &Word, params: &DeletionParams) -> bool {
    find_hairpin_occurrences(w, params)
        .iter()
        .any(|o| o.prefix_len == 0 && o.region_len() == w.len())
}

/// All results of parallel deletion (at least one region removed). With
/// `maximal`, additionally no left context may survive in any kept segment
/// before the last, and no step may apply to the last kept segment.
pub fn parallel_delete(w: &Word, params: &DeletionParams, maximal: bool) -> BTreeSet<Word> {
    parallel_delete_traced(w, params, maximal)
        .into_keys()
        .collect()
}

/// Like [`parallel_delete`], keeping one witnessing trace per result.
pub fn parallel_delete_traced(
    w: &Word,
    params: &DeletionParams,
    maximal: bool,
) -> BTreeMap<Word, DeletionTrace> {
    let scan = Scan::new(w.syms(), params);
    let regions = scan.regions_by_start();
    let left_cover = scan.left_cover();
    let step_cover = Scan::region_cover(&regions);

    let mut out: BTreeMap<Word, DeletionTrace> = BTreeMap::new();
    let mut steps: Vec<HairpinOccurrence> = Vec::new();

    // Depth-first over factorizations: at each position either extend the
    // current kept segment by one symbol or close it and delete a region.
    fn go(
        w: &Word,
        regions: &[Vec<(usize, HairpinOccurrence)>],
        left_cover: &[usize],
        step_cover: &[usize],
        maximal: bool,
        pos: usize,
        seg_start: usize,
        seg_left_min: usize,
        seg_step_min: usize,
        kept: &Word,
        steps: &mut Vec<HairpinOccurrence>,
        out: &mut BTreeMap<Word, DeletionTrace>,
    ) {
        if pos == w.len() {
            if steps.is_empty() {
                return; // at least one deletion required
            }
            if maximal && seg_step_min <= pos {
                return; // a step still applies to the final segment
            }
            let result = kept.concat(&w.slice(seg_start, pos));
            out.entry(result.clone()).or_insert_with(|| DeletionTrace {
                input: TraceInput::Linear(w.clone()),
                steps: steps.clone(),
                output: result,
                termination: None,
            });
            return;
        }
        // close the segment here and delete a region
        let seg_ok = !maximal || seg_left_min > pos;
        if seg_ok {
            for (end, occ) in &regions[pos] {
                let kept2 = kept.concat(&w.slice(seg_start, pos));
                steps.push(occ.clone());
                go(
                    w, regions, left_cover, step_cover, maximal, *end, *end,
                    usize::MAX, usize::MAX, &kept2, steps, out,
                );
                steps.pop();
            }
        }
        // keep the symbol at pos
        go(
            w,
            regions,
            left_cover,
            step_cover,
            maximal,
            pos + 1,
            seg_start,
            seg_left_min.min(left_cover[pos]),
            seg_step_min.min(step_cover[pos]),
            kept,
            steps,
            out,
        );
    }

    go(
        w,
        &regions,
        &left_cover,
        &step_cover,
        maximal,
        0,
        0,
        usize::MAX,
        usize::MAX,
        &w.alphabet().empty_word(),
        &mut steps,
        &mut out,
    );
    out
}

/// What a deletion trace was computed over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceInput {
    Linear(Word),
    /// The prefix `period^ω[0..prefix_len]` of a circular word.
    CircularPrefix { period: Word, prefix_len: usize },
}

impl TraceInput {
    /// The concrete word the steps apply to.
    pub fn word(&self) -> Word {
        match self {
            TraceInput::Linear(w) => w.clone(),
            TraceInput::CircularPrefix { period, prefix_len } => {
                let mut syms = Vec::with_capacity(*prefix_len);
                while syms.len() < *prefix_len {
                    let take = (*prefix_len - syms.len()).min(period.len());
                    syms.extend_from_slice(&period.syms()[..take]);
                }
                period.alphabet().word(syms)
            }
        }
    }
}

/// Termination evidence for a circular deletion: the matched terminating
/// sequence and the removed suffix stem `s = xθ(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Termination {
    pub terminator: Word,
    pub stem: Word,
}

/// Evidence for one produced word: the input, the simultaneously deleted
/// regions (ascending, non-overlapping, each deletable to ε on its own), the
/// resulting word, and the termination record for circular runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionTrace {
    pub input: TraceInput,
    pub steps: Vec<HairpinOccurrence>,
    pub output: Word,
    pub termination: Option<Termination>,
}

impl DeletionTrace {
    /// Removes every step's region from the input and returns what is kept
    /// (for circular traces this still includes the terminating stem).
    pub fn replay(&self) -> Word {
        let w = self.input.word();
        let mut kept = w.alphabet().empty_word();
        let mut pos = 0;
        for occ in &self.steps {
            let (s, e) = occ.region_bounds();
            kept = kept.concat(&w.slice(pos, s));
            pos = e;
        }
        kept.concat(&w.slice(pos, w.len()))
    }

    /// Checks that replaying reproduces the recorded output (plus the
    /// terminating stem, when present).
    pub fn is_consistent(&self) -> bool {
        let replayed = self.replay();
        match &self.termination {
            None => replayed == self.output,
            Some(t) => replayed == self.output.concat(&t.stem),
        }
    }
}

/// The result of terminating deletion over a circular word.
#[derive(Clone, Debug)]
pub struct CircularDeletionSet {
    /// Produced words (within the length bound) with one witnessing trace each.
    pub words: BTreeMap<Word, DeletionTrace>,
    /// True when the enumeration was cut short by the period bound while
    /// viable branches remained.
    pub saturated: bool,
    /// Diagnostic, e.g. when no terminating sequence occurs within the bound.
    pub note: Option<String>,
}

impl CircularDeletionSet {
    pub fn word_set(&self) -> BTreeSet<Word> {
        self.words.keys().cloned().collect()
    }
}

/// Terminating maximally parallel deletion over `cw`: enumerates every word
/// `u·s⁻¹` obtainable from a prefix `w't` of the circular word with `t` a
/// terminator, `w' ⊢ u` maximally parallel, and `s = xθ(x)` a suffix stem of
/// length `2m`. Only outputs of length at most `length_bound` are returned;
/// prefixes use at most `period_bound` periods.
pub fn circular_terminating_delete(
    cw: &CircularWord,
    params: &DeletionParams,
    length_bound: usize,
    period_bound: usize,
) -> Result<CircularDeletionSet, HairpinError> {
    if params.terminators.is_empty() {
        return Err(HairpinError::NoTerminators);
    }
    if period_bound == 0 {
        return Err(HairpinError::ZeroBound);
    }
    let buf_word = cw.unroll(period_bound)?;
    let buf = buf_word.syms();
    let m = params.term_stem_len;
    let budget = length_bound + 2 * m;

    let scan = Scan::new(buf, params);
    let regions = scan.regions_by_start();
    let left_cover = scan.left_cover();
    let step_cover = Scan::region_cover(&regions);

    // terminator occurrences by position (first matching terminator wins)
    let mut term_at: HashMap<usize, usize> = HashMap::new();
    let mut any_term = false;
    for (ti, t) in params.terminators.iter().enumerate() {
        for p in occurrences_in(t.syms(), buf) {
            term_at.entry(p).or_insert(ti);
            any_term = true;
        }
    }
    // a terminator cut off by the buffer end means the bound may hide results
    let mut saturated = params.terminators.iter().any(|t| {
        (1..t.len()).any(|k| buf.len() >= k && buf[buf.len() - k..] == t.syms()[..k])
    });

    let mut out: BTreeMap<Word, DeletionTrace> = BTreeMap::new();
    // key: (pos mod period, output, current segment length) → least absolute
    // position seen; a revisit at a later position can only reach less.
    let mut seen: HashMap<(usize, Vec<Sym>, usize), usize> = HashMap::new();
    let plen = cw.period().len();

    struct Ctx<'a> {
        buf: &'a [Sym],
        alphabet: &'a Alphabet,
        theta: &'a Involution,
        period: &'a Word,
        plen: usize,
        m: usize,
        budget: usize,
        length_bound: usize,
        regions: &'a [Vec<(usize, HairpinOccurrence)>],
        left_cover: &'a [usize],
        step_cover: &'a [usize],
        term_at: &'a HashMap<usize, usize>,
        terminators: &'a [Word],
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        c: &Ctx,
        pos: usize,
        seg_start: usize,
        seg_left_min: usize,
        seg_step_min: usize,
        output: &mut Vec<Sym>,
        steps: &mut Vec<HairpinOccurrence>,
        seen: &mut HashMap<(usize, Vec<Sym>, usize), usize>,
        out: &mut BTreeMap<Word, DeletionTrace>,
        saturated: &mut bool,
    ) {
        let seg_len = pos - seg_start;
        if output.len() + seg_len > c.budget {
            return;
        }
        let key = (pos % c.plen, output.clone(), seg_len);
        match seen.get(&key) {
            Some(&best) if best <= pos => return,
            _ => {
                seen.insert(key, pos);
            }
        }

        // try to terminate here: a terminator must follow, at least one
        // region must have been deleted, no step may apply to the final
        // segment, and the kept word must end in a 2m stem.
        if let Some(&ti) = c.term_at.get(&pos) {
            let ok_final_seg = seg_step_min > pos;
            let total = output.len() + seg_len;
            if !steps.is_empty() && ok_final_seg && total >= 2 * c.m {
                let mut u: Vec<Sym> = Vec::with_capacity(total);
                u.extend_from_slice(output);
                u.extend_from_slice(&c.buf[seg_start..pos]);
                let stem_ok = (0..c.m)
                    .all(|i| c.theta.apply_sym(u[total - 2 * c.m + i]) == u[total - 1 - i]);
                if stem_ok && total - 2 * c.m <= c.length_bound {
                    let result = c.alphabet.word(u[..total - 2 * c.m].iter().copied());
                    if !out.contains_key(&result) {
                        let stem = c.alphabet.word(u[total - 2 * c.m..].iter().copied());
                        out.insert(
                            result.clone(),
                            DeletionTrace {
                                input: TraceInput::CircularPrefix {
                                    period: c.period.clone(),
                                    prefix_len: pos,
                                },
                                steps: steps.clone(),
                                output: result.clone(),
                                termination: Some(Termination {
                                    terminator: c.terminators[ti].clone(),
                                    stem,
                                }),
                            },
                        );
                    }
                }
            }
        }

        // close the segment and delete a region starting here
        if seg_left_min > pos {
            for (end, occ) in &c.regions[pos] {
                for p in seg_start..pos {
                    output.push(c.buf[p]);
                }
                steps.push(occ.clone());
                go(
                    c, *end, *end, usize::MAX, usize::MAX, output, steps, seen, out, saturated,
                );
                steps.pop();
                output.truncate(output.len() - (pos - seg_start));
            }
        }

        // keep the symbol at pos
        if pos < c.buf.len() {
            go(
                c,
                pos + 1,
                seg_start,
                seg_left_min.min(c.left_cover[pos]),
                seg_step_min.min(c.step_cover[pos]),
                output,
                steps,
                seen,
                out,
                saturated,
            );
        } else {
            *saturated = true; // alive at the buffer end
        }
    }

    let ctx = Ctx {
        buf,
        alphabet: &params.alphabet,
        theta: &params.theta,
        period: cw.period(),
        plen,
        m,
        budget,
        length_bound,
        regions: &regions,
        left_cover: &left_cover,
        step_cover: &step_cover,
        term_at: &term_at,
        terminators: &params.terminators,
    };
    let mut output = Vec::new();
    let mut steps = Vec::new();
    go(
        &ctx,
        0,
        0,
        usize::MAX,
        usize::MAX,
        &mut output,
        &mut steps,
        &mut seen,
        &mut out,
        &mut saturated,
    );

    // Traces record only the closed segments' regions; the final segment of a
    // terminated run is kept text, so replay consistency holds by
    // construction. Outputs within the bound carry their first-found trace.
    let note = if !any_term {
        Some("no terminating sequence occurs within the period bound".to_string())
    } else {
        None
    };
    Ok(CircularDeletionSet {
        words: out,
        saturated,
        note,
    })
}

/// Convenience: θ(w), for building context sets and tests.
pub fn theta_image(theta: &Involution, w: &Word) -> Word {
    apply_involution(theta, w).expect("word over involution alphabet")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rna(s: &str) -> Word {
        Alphabet::rna().parse_word(s).unwrap()
    }

    fn params_wc(ctx: &[(&str, &str)], margin: usize, c: u32) -> DeletionParams {
        let a = Alphabet::rna();
        let pairs = ctx
            .iter()
            .map(|(l, r)| (a.parse_word(l).unwrap(), a.parse_word(r).unwrap()))
            .collect();
        DeletionParams::new(
            a,
            Involution::watson_crick_rna(),
            c,
            ContextSet::new(pairs).unwrap(),
            margin,
        )
        .unwrap()
    }

    #[test]
    fn log_predicate_boundaries() {
        assert!(log_hairpin_ok(4, 2, 1));
        assert!(log_hairpin_ok(0, 1, 1));
        assert!(log_hairpin_ok(0, 0, 1));
        assert!(log_hairpin_ok(11, 2048, 1));
        assert!(!log_hairpin_ok(11, 2049, 1));
        assert!(log_hairpin_ok(22, 2048, 2));
        assert!(!log_hairpin_ok(21, 2048, 2));
        // boundary band exercising the exact big-integer comparison
        assert!(log_hairpin_ok(130, 3, 82)); // 3^82 < 2^130
        assert!(!log_hairpin_ok(129, 3, 82)); // 3^82 > 2^129
    }

    #[test]
    fn single_step_example_with_margin() {
        // w_p=A α=AUA x=A ℓ=CC θ(x)θ(α)=UUAU z=G β=CCC w_s=GA
        let p = params_wc(&[("AUA", "CCC")], 1, 1);
        let w = rna("AAUAACCUUAUGCCCGA");
        let occs = find_hairpin_occurrences(&w, &p);
        assert!(!occs.is_empty());
        let with_x = occs
            .iter()
            .find(|o| o.stem_ext_len == 1)
            .expect("occurrence with x = A");
        let seg = with_x.segments(&w);
        assert_eq!(seg.prefix, rna("A"));
        assert_eq!(seg.alpha, rna("AUA"));
        assert_eq!(seg.stem_ext, rna("A"));
        assert_eq!(seg.lop, rna("CC"));
        assert_eq!(seg.theta_block, rna("UUAU"));
        assert_eq!(seg.margin, rna("G"));
        assert_eq!(seg.beta, rna("CCC"));
        assert_eq!(seg.suffix, rna("GA"));
        assert_eq!(delete_step(&w, &p), BTreeSet::from([rna("AGA")]));
    }

    #[test]
    fn no_left_context_means_no_step() {
        let p = params_wc(&[("CG", "GC")], 0, 1);
        assert!(find_hairpin_occurrences(&rna("AAAA"), &p).is_empty());
        assert!(delete_step(&rna("AAAA"), &p).is_empty());
    }

    #[test]
    fn deletable_to_empty_cases() {
        let p = params_wc(&[("AA", "CC")], 0, 1);
        assert!(deletable_to_empty(&rna("AAGUUCC"), &p));
        assert!(!deletable_to_empty(&rna(""), &p));
        assert!(!deletable_to_empty(&rna("AAGUUCCG"), &p));
        // the single occurrence of AAGUUCC: α=AA x=ε ℓ=G z=ε
        let occs = find_hairpin_occurrences(&rna("AAGUUCC"), &p);
        assert_eq!(occs.len(), 1);
        assert_eq!(occs[0].stem_ext_len, 0);
        assert_eq!(occs[0].loop_len, 1);
        assert_eq!(occs[0].margin_len, 0);
    }

    #[test]
    fn parallel_deletion_display_example() {
        let p = params_wc(&[("AA", "CC"), ("CC", "CC")], 0, 1);
        let w = rna("CAAAGUUCCUGCCAAGGCCG");
        let got = parallel_delete(&w, &p, false);
        assert!(got.contains(&rna("CAUGG")), "missing CAUGG in {got:?}");
    }

    #[test]
    fn maximal_forces_both_deletions() {
        let p = params_wc(&[("AA", "CC")], 0, 1);
        let w = rna("AAGUUCCAAGUUCC");
        assert_eq!(parallel_delete(&w, &p, true), BTreeSet::from([rna("")]));
        assert_eq!(
            parallel_delete(&w, &p, false),
            BTreeSet::from([rna(""), rna("AAGUUCC")])
        );
    }

    #[test]
    fn min_loop_flag_restricts() {
        let p = params_wc(&[("AA", "CC")], 0, 1).with_min_loop(3);
        // the only region has loop G of length 1
        assert!(!deletable_to_empty(&rna("AAGUUCC"), &p));
    }

    #[test]
    fn traces_replay() {
        let p = params_wc(&[("AA", "CC"), ("CC", "CC")], 0, 1);
        let w = rna("CAAAGUUCCUGCCAAGGCCG");
        for (word, trace) in parallel_delete_traced(&w, &p, false) {
            assert!(trace.is_consistent(), "bad trace for {word}");
        }
    }

    #[test]
    fn circular_without_terminator_occurrence_is_empty_with_note() {
        let p = params_wc(&[("AA", "CC")], 0, 1)
            .with_termination(vec![rna("GGGG")], 2)
            .unwrap();
        let cw = CircularWord::new(rna("AAGUUCCAU")).unwrap();
        let got = circular_terminating_delete(&cw, &p, 3, 4).unwrap();
        assert!(got.words.is_empty());
        assert!(got.note.is_some());
    }

    #[test]
    fn circular_requires_terminators() {
        let p = params_wc(&[("AA", "CC")], 0, 1);
        let cw = CircularWord::new(rna("AAGUUCC")).unwrap();
        assert_eq!(
            circular_terminating_delete(&cw, &p, 3, 4).unwrap_err(),
            HairpinError::NoTerminators
        );
    }
}
