//! Invertible letter-permuting automata given by their Moore diagrams.
//!
//! An automaton has a finite alphabet `{0, .., k-1}`, a distinguished
//! identity state, and for every state `q` a permutation `perm_q` of the
//! letters together with a section map `sect_q : letter -> state`. An arrow
//! `q --x|y--> q'` of the Moore diagram means `perm_q(x) = y` and
//! `sect_q(x) = q'`.

use crate::error::ParseError;
use crate::word::Letter;

/// The alphabet `{0, .., size-1}`, `size >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub size: usize,
}

impl Alphabet {
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.size as Letter
    }

    pub fn contains(&self, x: Letter) -> bool {
        (x as usize) < self.size
    }
}

/// Index of a state in the automaton's state list.
pub type StateId = usize;

#[derive(Clone, Debug)]
pub struct State {
    pub name: String,
    /// `perm[x]` is the image of letter `x`.
    pub perm: Vec<Letter>,
    /// `sect[x]` is the state acting below letter `x`.
    pub sect: Vec<StateId>,
}

/// A Moore-diagram automaton presenting a self-similar group.
#[derive(Clone, Debug)]
pub struct Automaton {
    pub alphabet: Alphabet,
    pub states: Vec<State>,
    pub identity: StateId,
}

impl Automaton {
    /// Assemble an automaton from raw parts and verify the invariants.
    pub fn new(
        alphabet: Alphabet,
        states: Vec<State>,
        identity: StateId,
    ) -> Result<Self, ParseError> {
        let aut = Automaton {
            alphabet,
            states,
            identity,
        };
        aut.validate()?;
        Ok(aut)
    }

    fn validate(&self) -> Result<(), ParseError> {
        if self.alphabet.size < 2 {
            return Err(ParseError::Syntax {
                line: 0,
                msg: format!("alphabet size must be at least 2, got {}", self.alphabet.size),
            });
        }
        let k = self.alphabet.size;
        let mut seen = std::collections::HashSet::new();
        for st in &self.states {
            if !seen.insert(st.name.clone()) {
                return Err(ParseError::DuplicateState { name: st.name.clone() });
            }
            if st.perm.len() != k || st.sect.len() != k {
                return Err(ParseError::Syntax {
                    line: 0,
                    msg: format!("state `{}` must list every letter exactly once", st.name),
                });
            }
            let mut hit = vec![false; k];
            for &y in &st.perm {
                if (y as usize) >= k {
                    return Err(ParseError::Syntax {
                        line: 0,
                        msg: format!("state `{}` outputs letter {} outside the alphabet", st.name, y),
                    });
                }
                hit[y as usize] = true;
            }
            if hit.iter().any(|h| !h) {
                return Err(ParseError::NonBijectiveOutput { state: st.name.clone() });
            }
            for &s in &st.sect {
                if s >= self.states.len() {
                    return Err(ParseError::UnknownState {
                        name: format!("#{}", s),
                    });
                }
            }
        }
        let e = &self.states[self.identity];
        let id_ok = e.perm.iter().enumerate().all(|(x, &y)| x as Letter == y)
            && e.sect.iter().all(|&s| s == self.identity);
        if !id_ok {
            return Err(ParseError::BadIdentity { name: e.name.clone() });
        }
        Ok(())
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.states[q].name
    }

    /// `perm_q(x)`.
    pub fn perm(&self, q: StateId, x: Letter) -> Letter {
        self.states[q].perm[x as usize]
    }

    /// `perm_q^{-1}(x)`.
    pub fn perm_inv(&self, q: StateId, x: Letter) -> Letter {
        self.states[q]
            .perm
            .iter()
            .position(|&y| y == x)
            .expect("permutation is bijective") as Letter
    }

    /// `sect_q(x)`.
    pub fn sect(&self, q: StateId, x: Letter) -> StateId {
        self.states[q].sect[x as usize]
    }

    /// Parse the line-oriented automaton file format:
    ///
    /// ```text
    /// alphabet: 2
    /// identity: e
    /// state a: 0 -> 1 / e, 1 -> 0 / e
    /// state b: 0 -> 0 / a, 1 -> 1 / c
    /// ```
    ///
    /// `#` starts a comment; an explicit line for the identity state is
    /// optional and verified when present.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        // Transition rule as written: (input letter, output letter, section name).
        type Rule = (Letter, Letter, String);
        let mut alphabet: Option<usize> = None;
        let mut identity_name: Option<String> = None;
        // (name, rules, line number).
        let mut decls: Vec<(String, Vec<Rule>, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("alphabet:") {
                let k: usize = rest.trim().parse().map_err(|_| ParseError::Syntax {
                    line: lineno,
                    msg: format!("bad alphabet size `{}`", rest.trim()),
                })?;
                alphabet = Some(k);
            } else if let Some(rest) = line.strip_prefix("identity:") {
                identity_name = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("state ") {
                let (name, rules_str) = rest.split_once(':').ok_or(ParseError::Syntax {
                    line: lineno,
                    msg: "expected `state NAME: rules`".to_string(),
                })?;
                let mut rules = Vec::new();
                for rule in rules_str.split(',') {
                    let rule = rule.trim();
                    if rule.is_empty() {
                        continue;
                    }
                    // `x -> y / s`
                    let (lhs, rhs) = rule.split_once("->").ok_or(ParseError::Syntax {
                        line: lineno,
                        msg: format!("expected `x -> y / s` in `{}`", rule),
                    })?;
                    let (out, sec) = rhs.split_once('/').ok_or(ParseError::Syntax {
                        line: lineno,
                        msg: format!("expected `x -> y / s` in `{}`", rule),
                    })?;
                    let x: Letter = lhs.trim().parse().map_err(|_| ParseError::Syntax {
                        line: lineno,
                        msg: format!("bad letter `{}`", lhs.trim()),
                    })?;
                    let y: Letter = out.trim().parse().map_err(|_| ParseError::Syntax {
                        line: lineno,
                        msg: format!("bad letter `{}`", out.trim()),
                    })?;
                    rules.push((x, y, sec.trim().to_string()));
                }
                decls.push((name.trim().to_string(), rules, lineno));
            } else {
                return Err(ParseError::Syntax {
                    line: lineno,
                    msg: format!("unrecognized line `{}`", line),
                });
            }
        }

        let k = alphabet.ok_or(ParseError::Syntax {
            line: 0,
            msg: "missing `alphabet:` line".to_string(),
        })?;
        let identity_name = identity_name.ok_or(ParseError::MissingIdentity)?;

        // Assign state ids: declared states in order, the identity appended
        // if it has no explicit line.
        let mut names: Vec<String> = Vec::new();
        for (name, _, _) in &decls {
            if names.contains(name) {
                return Err(ParseError::DuplicateState { name: name.clone() });
            }
            names.push(name.clone());
        }
        if !names.contains(&identity_name) {
            names.push(identity_name.clone());
        }
        let id_of = |n: &str| names.iter().position(|m| m == n);
        let identity = id_of(&identity_name).unwrap();

        let mut states: Vec<State> = names
            .iter()
            .map(|n| State {
                name: n.clone(),
                perm: (0..k as Letter).collect(),
                sect: vec![identity; k],
            })
            .collect();

        for (name, rules, lineno) in &decls {
            let q = id_of(name).unwrap();
            let mut perm = vec![None; k];
            let mut sect = vec![None; k];
            for (x, y, sec_name) in rules {
                if (*x as usize) >= k || (*y as usize) >= k {
                    return Err(ParseError::Syntax {
                        line: *lineno,
                        msg: format!("letter out of range in state `{}`", name),
                    });
                }
                if perm[*x as usize].is_some() {
                    return Err(ParseError::Syntax {
                        line: *lineno,
                        msg: format!("state `{}` lists letter {} twice", name, x),
                    });
                }
                let s = id_of(sec_name).ok_or(ParseError::UnknownState {
                    name: sec_name.clone(),
                })?;
                perm[*x as usize] = Some(*y);
                sect[*x as usize] = Some(s);
            }
            if perm.iter().any(|p| p.is_none()) {
                return Err(ParseError::Syntax {
                    line: *lineno,
                    msg: format!("state `{}` must list every letter exactly once", name),
                });
            }
            states[q] = State {
                name: name.clone(),
                perm: perm.into_iter().map(Option::unwrap).collect(),
                sect: sect.into_iter().map(Option::unwrap).collect(),
            };
        }

        Automaton::new(Alphabet { size: k }, states, identity)
    }

    /// Render the automaton back into the file format. Reparsing the result
    /// yields an equal automaton.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("alphabet: {}\n", self.alphabet.size));
        out.push_str(&format!("identity: {}\n", self.name(self.identity)));
        for (q, st) in self.states.iter().enumerate() {
            if q == self.identity {
                continue;
            }
            let rules: Vec<String> = (0..self.alphabet.size)
                .map(|x| {
                    format!(
                        "{} -> {} / {}",
                        x,
                        st.perm[x],
                        self.name(st.sect[x])
                    )
                })
                .collect();
            out.push_str(&format!("state {}: {}\n", st.name, rules.join(", ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const GRIGORCHUK: &str = "\
# Grigorchuk group
alphabet: 2
identity: e
state a: 0 -> 1 / e, 1 -> 0 / e
state b: 0 -> 0 / a, 1 -> 1 / c
state c: 0 -> 0 / a, 1 -> 1 / d
state d: 0 -> 0 / e, 1 -> 1 / b
";

    #[test]
    fn parses_grigorchuk() {
        let aut = Automaton::parse(GRIGORCHUK).unwrap();
        assert_eq!(aut.state_count(), 5);
        let b = aut.state_by_name("b").unwrap();
        let a = aut.state_by_name("a").unwrap();
        let c = aut.state_by_name("c").unwrap();
        assert_eq!(aut.perm(b, 0), 0);
        assert_eq!(aut.sect(b, 0), a);
        assert_eq!(aut.perm(b, 1), 1);
        assert_eq!(aut.sect(b, 1), c);
    }

    #[test]
    fn identity_only_file() {
        let aut = Automaton::parse("alphabet: 2\nidentity: e\n").unwrap();
        assert_eq!(aut.state_count(), 1);
        assert_eq!(aut.identity, 0);
    }

    #[test]
    fn rejects_non_bijective_output() {
        let text = "alphabet: 2\nidentity: e\nstate a: 0 -> 1 / e, 1 -> 1 / e\n";
        match Automaton::parse(text) {
            Err(ParseError::NonBijectiveOutput { state }) => assert_eq!(state, "a"),
            other => panic!("expected NonBijectiveOutput, got {:?}", other),
        }
    }

    #[test]
    fn rejects_unknown_state_and_duplicates() {
        let text = "alphabet: 2\nidentity: e\nstate a: 0 -> 1 / q, 1 -> 0 / e\n";
        assert!(matches!(
            Automaton::parse(text),
            Err(ParseError::UnknownState { .. })
        ));
        let text = "alphabet: 2\nidentity: e\nstate a: 0 -> 1 / e, 1 -> 0 / e\nstate a: 0 -> 0 / e, 1 -> 1 / e\n";
        assert!(matches!(
            Automaton::parse(text),
            Err(ParseError::DuplicateState { .. })
        ));
    }

    #[test]
    fn missing_identity_reported() {
        let text = "alphabet: 2\nstate a: 0 -> 1 / a, 1 -> 0 / a\n";
        assert!(matches!(Automaton::parse(text), Err(ParseError::MissingIdentity)));
    }

    #[test]
    fn serialize_round_trips() {
        let aut = Automaton::parse(GRIGORCHUK).unwrap();
        let again = Automaton::parse(&aut.serialize()).unwrap();
        assert_eq!(aut.serialize(), again.serialize());
    }
}
