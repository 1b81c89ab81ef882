//! Nondeterministic finite automata: acceptance, bounded language
//! enumeration, finiteness, trimming, and the line-oriented text format.
//!
//! States are opaque tokens with a declared total order (their declaration
//! order), which the restricted automata models build on. There are no
//! ε-transitions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::words::{Alphabet, Sym, Word, WordError};

/// Index into an [`Nfa`]'s state list; the index order is the state order.
pub type StateId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NfaError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("NFA must have at least one state")]
    NoStates,
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A nondeterministic finite automaton over a declared alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    /// Transition triples in declaration order (kept for deterministic
    /// per-state transition ordering downstream).
    transitions: Vec<(StateId, Sym, StateId)>,
}

impl Nfa {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: &str,
        finals: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Nfa, NfaError> {
        if states.is_empty() {
            return Err(NfaError::NoStates);
        }
        let idx = |name: &str| -> Result<StateId, NfaError> {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| NfaError::UnknownState(name.to_string()))
        };
        let initial = idx(initial)?;
        let mut fin = BTreeSet::new();
        for f in finals {
            fin.insert(idx(f)?);
        }
        let mut trans = Vec::new();
        for (p, a, q) in transitions {
            trans.push((idx(p)?, alphabet.sym(a)?, idx(q)?));
        }
        Ok(Nfa {
            alphabet,
            states,
            initial,
            finals: fin,
            transitions: trans,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.contains(&q)
    }

    pub fn transitions(&self) -> &[(StateId, Sym, StateId)] {
        &self.transitions
    }

    /// Outgoing transitions of `q` as `(symbol, target)`, in declaration order.
    pub fn transitions_from(&self, q: StateId) -> Vec<(Sym, StateId)> {
        self.transitions
            .iter()
            .filter(|(p, _, _)| *p == q)
            .map(|&(_, a, r)| (a, r))
            .collect()
    }

    fn step(&self, set: &BTreeSet<StateId>, a: Sym) -> BTreeSet<StateId> {
        let mut next = BTreeSet::new();
        for &(p, b, q) in &self.transitions {
            if b == a && set.contains(&p) {
                next.insert(q);
            }
        }
        next
    }

    /// Subset-construction acceptance.
    pub fn accepts(&self, w: &Word) -> bool {
        debug_assert_eq!(w.alphabet(), &self.alphabet);
        let mut cur: BTreeSet<StateId> = BTreeSet::from([self.initial]);
        for &a in w.syms() {
            cur = self.step(&cur, a);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.finals.contains(q))
    }

    /// `L(A) ∩ Σ^{≤ max_len}`, exact, by breadth-first expansion of length
    /// layers paired with reachable state sets.
    pub fn enumerate_language(&self, max_len: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        let mut layer: Vec<(Vec<Sym>, BTreeSet<StateId>)> =
            vec![(Vec::new(), BTreeSet::from([self.initial]))];
        if self.finals.contains(&self.initial) {
            out.insert(self.alphabet.empty_word());
        }
        for _ in 0..max_len {
            let mut next_layer = Vec::new();
            for (word, set) in &layer {
                for a in self.alphabet.symbols() {
                    let next = self.step(set, a);
                    if next.is_empty() {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(a);
                    if next.iter().any(|q| self.finals.contains(q)) {
                        out.insert(self.alphabet.word(w.iter().copied()));
                    }
                    next_layer.push((w, next));
                }
            }
            layer = next_layer;
            if layer.is_empty() {
                break;
            }
        }
        out
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(p) = queue.pop_front() {
            for &(src, _, dst) in &self.transitions {
                if src == p && seen.insert(dst) {
                    queue.push_back(dst);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub fn coreachable(&self) -> BTreeSet<StateId> {
        let mut seen = self.finals.clone();
        let mut queue: VecDeque<StateId> = self.finals.iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            for &(src, _, dst) in &self.transitions {
                if dst == q && seen.insert(src) {
                    queue.push_back(src);
                }
            }
        }
        seen
    }

    /// Removes states that are unreachable or do not lead to a final state.
    /// The initial state is always kept (possibly with no transitions).
    pub fn trim(&self) -> Nfa {
        let reach = self.reachable();
        let coreach = self.coreachable();
        let mut keep: Vec<StateId> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, _)| i)
            .filter(|i| reach.contains(i) && coreach.contains(i))
            .collect();
        if !keep.contains(&self.initial) {
            keep.push(self.initial);
            keep.sort_unstable();
        }
        let remap: BTreeMap<StateId, StateId> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        Nfa {
            alphabet: self.alphabet.clone(),
            states: keep.iter().map(|&i| self.states[i].clone()).collect(),
            initial: remap[&self.initial],
            finals: self
                .finals
                .iter()
                .filter_map(|q| remap.get(q).copied())
                .collect(),
            transitions: self
                .transitions
                .iter()
                .filter_map(|&(p, a, q)| {
                    Some((*remap.get(&p)?, a, *remap.get(&q)?))
                })
                .collect(),
        }
    }

    /// True iff no cycle lies on a path from the initial state to a final
    /// state, i.e. the trimmed automaton is acyclic.
    pub fn is_finite_language(&self) -> bool {
        let t = self.trim();
        // DFS three-coloring for cycle detection.
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let n = t.state_count();
        let mut color = vec![Color::White; n];
        let mut succ: Vec<BTreeSet<StateId>> = vec![BTreeSet::new(); n];
        for &(p, _, q) in &t.transitions {
            succ[p].insert(q);
        }
        fn visit(
            v: StateId,
            color: &mut [Color],
            succ: &[BTreeSet<StateId>],
        ) -> bool {
            color[v] = Color::Gray;
            for &w in &succ[v] {
                match color[w] {
                    Color::Gray => return false,
                    Color::White => {
                        if !visit(w, color, succ) {
                            return false;
                        }
                    }
                    Color::Black => {}
                }
            }
            color[v] = Color::Black;
            true
        }
        for v in 0..n {
            if color[v] == Color::White && !visit(v, &mut color, &succ) {
                return false;
            }
        }
        true
    }

    /// Parses the line-oriented text format:
    ///
    /// ```text
    /// alphabet: A U
    /// states: q1 q2
    /// initial: q1
    /// final: q2
    /// trans: q1 A q2
    /// ```
    ///
    /// `#` starts a comment; state declaration order is the state order.
    pub fn parse(text: &str) -> Result<Nfa, NfaError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut states: Vec<String> = Vec::new();
        let mut initial: Option<String> = None;
        let mut finals: Vec<String> = Vec::new();
        let mut trans: Vec<(String, String, String)> = Vec::new();

        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| NfaError::Parse {
                line: ln + 1,
                msg: msg.to_string(),
            };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err("expected `key: values`"))?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(err("duplicate alphabet line"));
                    }
                    if fields.iter().any(|t| *t == "<eps>" || *t == "eps") {
                        return Err(err("epsilon is not a symbol"));
                    }
                    alphabet =
                        Some(Alphabet::new(fields.iter().map(|s| s.to_string())).map_err(
                            |e| err(&e.to_string()),
                        )?);
                }
                "states" => {
                    if !states.is_empty() {
                        return Err(err("duplicate states line"));
                    }
                    states = fields.iter().map(|s| s.to_string()).collect();
                }
                "initial" => {
                    if initial.is_some() {
                        return Err(err("duplicate initial line"));
                    }
                    if fields.len() != 1 {
                        return Err(err("initial takes exactly one state"));
                    }
                    initial = Some(fields[0].to_string());
                }
                "final" => {
                    finals.extend(fields.iter().map(|s| s.to_string()));
                }
                "trans" => {
                    if fields.len() != 3 {
                        return Err(err("trans takes `source symbol target`"));
                    }
                    if fields[1] == "<eps>" || fields[1] == "eps" {
                        return Err(err("epsilon transitions are not supported"));
                    }
                    trans.push((
                        fields[0].to_string(),
                        fields[1].to_string(),
                        fields[2].to_string(),
                    ));
                }
                other => return Err(err(&format!("unknown key {other:?}"))),
            }
        }

        let alphabet = alphabet.ok_or(NfaError::Parse {
            line: 0,
            msg: "missing alphabet line".into(),
        })?;
        if states.is_empty() {
            return Err(NfaError::Parse {
                line: 0,
                msg: "missing states line".into(),
            });
        }
        let initial = initial.ok_or(NfaError::Parse {
            line: 0,
            msg: "missing initial line".into(),
        })?;
        let finals: Vec<&str> = finals.iter().map(|s| s.as_str()).collect();
        let trans: Vec<(&str, &str, &str)> = trans
            .iter()
            .map(|(p, a, q)| (p.as_str(), a.as_str(), q.as_str()))
            .collect();
        Nfa::new(alphabet, states, &initial, &finals, &trans)
    }

    /// Serializes canonically: one line per section, transitions sorted.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "alphabet: {}", self.alphabet.tokens().join(" ")).unwrap();
        writeln!(s, "states: {}", self.states.join(" ")).unwrap();
        writeln!(s, "initial: {}", self.states[self.initial]).unwrap();
        let finals: Vec<&str> = self.finals.iter().map(|&q| self.state_name(q)).collect();
        writeln!(s, "final: {}", finals.join(" ")).unwrap();
        let mut trans = self.transitions.clone();
        trans.sort_unstable();
        trans.dedup();
        for (p, a, q) in trans {
            writeln!(
                s,
                "trans: {} {} {}",
                self.states[p],
                self.alphabet.token(a),
                self.states[q]
            )
            .unwrap();
        }
        s
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The two-state machine: q1 --A--> q2, q2 --U--> q1, q2 --A--> q2,
    /// initial q1, final q2.
    pub(crate) fn two_state() -> Nfa {
        Nfa::new(
            Alphabet::rna(),
            vec!["q1".into(), "q2".into()],
            "q1",
            &["q2"],
            &[("q1", "A", "q2"), ("q2", "U", "q1"), ("q2", "A", "q2")],
        )
        .unwrap()
    }

    fn aabstar() -> Nfa {
        // accepts aab*aa with 5 states
        Nfa::new(
            Alphabet::new(["a", "b"]).unwrap(),
            (1..=5).map(|i| format!("p{i}")).collect(),
            "p1",
            &["p5"],
            &[
                ("p1", "a", "p2"),
                ("p2", "a", "p3"),
                ("p3", "b", "p3"),
                ("p3", "a", "p4"),
                ("p4", "a", "p5"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn acceptance_follows_the_transition_table() {
        let a = two_state();
        let rna = Alphabet::rna();
        assert!(a.accepts(&rna.parse_word("A").unwrap()));
        assert!(!a.accepts(&rna.parse_word("").unwrap()));
        assert!(a.accepts(&rna.parse_word("AUA").unwrap()));
        assert!(!a.accepts(&rna.parse_word("AU").unwrap()));
    }

    #[test]
    fn bounded_enumeration_matches_hand_simulation() {
        let a = two_state();
        let rna = Alphabet::rna();
        let got = a.enumerate_language(3);
        let want: BTreeSet<Word> = ["A", "AA", "AAA", "AUA"]
            .iter()
            .map(|s| rna.parse_word(s).unwrap())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn zero_length_layer_is_epsilon_iff_initial_final() {
        let a = two_state();
        assert!(a.enumerate_language(0).is_empty());
        let b = Nfa::new(
            Alphabet::rna(),
            vec!["q1".into()],
            "q1",
            &["q1"],
            &[],
        )
        .unwrap();
        assert_eq!(
            b.enumerate_language(0),
            BTreeSet::from([Alphabet::rna().empty_word()])
        );
    }

    #[test]
    fn aabstar_language_up_to_seven() {
        let m = aabstar();
        let al = m.alphabet().clone();
        let got = m.enumerate_language(7);
        let want: BTreeSet<Word> = ["aaaa", "aabaa", "aabbaa", "aabbbaa"]
            .iter()
            .map(|s| al.parse_word(s).unwrap())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn finiteness_checks() {
        assert!(!two_state().is_finite_language()); // self-loop on accepting q2
        assert!(!aabstar().is_finite_language());
        let path = Nfa::new(
            Alphabet::new(["0", "1"]).unwrap(),
            (0..5).map(|i| format!("s{i}")).collect(),
            "s0",
            &["s4"],
            &[
                ("s0", "0", "s1"),
                ("s1", "1", "s2"),
                ("s2", "1", "s3"),
                ("s3", "0", "s4"),
            ],
        )
        .unwrap();
        assert!(path.is_finite_language());
    }

    #[test]
    fn unproductive_cycles_do_not_make_the_language_infinite() {
        // cycle on a state that cannot reach a final state
        let m = Nfa::new(
            Alphabet::new(["a"]).unwrap(),
            vec!["q1".into(), "q2".into(), "q3".into()],
            "q1",
            &["q2"],
            &[("q1", "a", "q2"), ("q1", "a", "q3"), ("q3", "a", "q3")],
        )
        .unwrap();
        assert!(m.is_finite_language());
        let t = m.trim();
        assert_eq!(t.state_count(), 2);
    }

    #[test]
    fn parse_and_serialize_round_trip() {
        let text = "\
# the two-state machine
alphabet: A U
states: q1 q2
initial: q1
final: q2
trans: q1 A q2
trans: q2 U q1
trans: q2 A q2
";
        let parsed = Nfa::parse(text).unwrap();
        let rna2 = Alphabet::new(["A", "U"]).unwrap();
        assert!(parsed.accepts(&rna2.parse_word("AUA").unwrap()));
        let canon = parsed.to_text();
        let reparsed = Nfa::parse(&canon).unwrap();
        assert_eq!(reparsed.to_text(), canon);
    }

    #[test]
    fn parse_rejects_epsilon_and_unknowns() {
        assert!(matches!(
            Nfa::parse("alphabet: a eps\nstates: q\ninitial: q\nfinal: q\n"),
            Err(NfaError::Parse { .. })
        ));
        assert!(matches!(
            Nfa::parse(
                "alphabet: a\nstates: q\ninitial: q\nfinal: q\ntrans: q b q\n"
            ),
            Err(NfaError::UnknownState(_)) | Err(NfaError::Word(_))
        ));
    }
}
