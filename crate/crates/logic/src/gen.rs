//! Random sentences for property tests and oracles.

use oimso_core::Vocabulary;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::{CountTarget, Formula, Var};

#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Maximum quantifier rank.
    pub rank: usize,
    /// Rough bound on the number of connectives.
    pub size: usize,
    /// Quantify only over sets.
    pub set_only: bool,
    /// Allow `<=` atoms.
    pub order: bool,
    /// Largest modulus of counting atoms; 1 disables them.
    pub modulus: u32,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            rank: 2,
            size: 10,
            set_only: false,
            order: false,
            modulus: 1,
        }
    }
}

const ELEM_NAMES: [&str; 4] = ["x", "y", "z", "w"];
const SET_NAMES: [&str; 4] = ["X", "Y", "Z", "W"];

struct Gen<'a, R> {
    rng: &'a mut R,
    voc: &'a Vocabulary,
    opts: &'a GenOptions,
    budget: usize,
    elems: Vec<&'static str>,
    sets: Vec<&'static str>,
}

impl<R: Rng> Gen<'_, R> {
    fn term(&mut self) -> Option<Var> {
        let use_set = !self.sets.is_empty() && (self.elems.is_empty() || self.rng.gen_bool(0.3));
        if use_set {
            Some(Var::Set(self.sets.choose(self.rng)?.to_string()))
        } else {
            Some(Var::Elem(self.elems.choose(self.rng)?.to_string()))
        }
    }

    fn set(&mut self) -> Option<String> {
        self.sets.choose(self.rng).map(|s| s.to_string())
    }

    fn atom(&mut self) -> Formula {
        for _ in 0..8 {
            let f = match self.rng.gen_range(0..8) {
                0 | 1 => {
                    let syms = self.voc.symbols();
                    if syms.is_empty() {
                        continue;
                    }
                    let s = &syms[self.rng.gen_range(0..syms.len())];
                    let args: Option<Vec<Var>> = (0..s.arity).map(|_| self.term()).collect();
                    args.map(|a| Formula::Rel(s.name.clone(), a))
                }
                2 => self.term().zip(self.term()).map(|(a, b)| Formula::Eq(a, b)),
                3 if self.opts.order => self.term().zip(self.term()).map(|(a, b)| Formula::Le(a, b)),
                4 => {
                    let x = self.elems.choose(self.rng).map(|s| s.to_string());
                    x.zip(self.set()).map(|(x, s)| Formula::In(x, s))
                }
                5 => self.set().zip(self.set()).map(|(a, b)| Formula::Sub(a, b)),
                6 => self.set().map(Formula::Sing),
                7 if self.opts.modulus >= 2 => {
                    let m = self.rng.gen_range(2..=self.opts.modulus);
                    self.set().map(|s| Formula::Count(m, CountTarget::Set(s)))
                }
                _ => None,
            };
            if let Some(f) = f {
                return f;
            }
        }
        if self.rng.gen_bool(0.5) {
            Formula::True
        } else {
            Formula::False
        }
    }

    fn formula(&mut self, q: usize) -> Formula {
        if self.budget == 0 {
            return self.atom();
        }
        self.budget -= 1;
        let quantify = q > 0 && (self.elems.is_empty() && self.sets.is_empty() || self.rng.gen_bool(0.4));
        if quantify {
            let set = self.opts.set_only || self.rng.gen_bool(0.5);
            let (pool, bound) = if set {
                (&SET_NAMES, &self.sets)
            } else {
                (&ELEM_NAMES, &self.elems)
            };
            let name = pool[bound.len() % pool.len()];
            if set {
                self.sets.push(name)
            } else {
                self.elems.push(name)
            }
            let body = self.formula(q - 1);
            if set {
                self.sets.pop();
            } else {
                self.elems.pop();
            }
            return match (set, self.rng.gen_bool(0.5)) {
                (false, true) => Formula::exists(name, body),
                (false, false) => Formula::forall(name, body),
                (true, true) => Formula::exists_set(name, body),
                (true, false) => Formula::forall_set(name, body),
            };
        }
        match self.rng.gen_range(0..6) {
            0 => self.atom(),
            1 => Formula::not(self.formula(q)),
            2 | 3 => Formula::and(self.formula(q), self.formula(q)),
            4 => Formula::or(self.formula(q), self.formula(q)),
            _ => Formula::implies(self.formula(q), self.formula(q)),
        }
    }
}

/// A random sentence over `voc` of rank at most `opts.rank`.
pub fn random_sentence<R: Rng>(rng: &mut R, voc: &Vocabulary, opts: &GenOptions) -> Formula {
    let mut g = Gen {
        rng,
        voc,
        opts,
        budget: opts.size,
        elems: Vec::new(),
        sets: Vec::new(),
    };
    g.formula(opts.rank)
}
