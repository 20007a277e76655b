use std::collections::BTreeSet;
use std::fmt;

/// A variable occurrence. Element variables are lowercase, set variables
/// uppercase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Elem(String),
    Set(String),
}

impl Var {
    pub fn name(&self) -> &str {
        match self {
            Var::Elem(n) | Var::Set(n) => n,
        }
    }
}

/// Argument of a relation, equality or order atom. A set argument denotes
/// its unique element and makes the atom false unless it is a singleton.
pub type Arg = Var;

/// What a modulo atom `C_m(..)` counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CountTarget {
    Set(String),
    /// A unary relation symbol.
    Unary(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Arg>),
    Eq(Arg, Arg),
    /// The distinguished linear order.
    Le(Arg, Arg),
    In(String, String),
    Sub(String, String),
    Sing(String),
    /// `C_m(X)`: `m` divides the size of the target.
    Count(u32, CountTarget),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

use Formula::*;

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        Exists(x.into(), Box::new(f))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Forall(x.into(), Box::new(f))
    }

    pub fn exists_set(x: &str, f: Formula) -> Formula {
        ExistsSet(x.into(), Box::new(f))
    }

    pub fn forall_set(x: &str, f: Formula) -> Formula {
        ForallSet(x.into(), Box::new(f))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Disjunction of all items; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// Maximum nesting depth of quantifiers of either kind.
    pub fn rank(&self) -> usize {
        match self {
            Not(f) => f.rank(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.rank().max(b.rank()),
            Exists(_, f) | Forall(_, f) | ExistsSet(_, f) | ForallSet(_, f) => 1 + f.rank(),
            _ => 0,
        }
    }

    /// Largest modulus of a counting atom, 1 if there is none.
    pub fn max_modulus(&self) -> u32 {
        match self {
            Count(m, _) => (*m).max(1),
            Not(f) => f.max_modulus(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.max_modulus().max(b.max_modulus()),
            Exists(_, f) | Forall(_, f) | ExistsSet(_, f) | ForallSet(_, f) => f.max_modulus(),
            _ => 1,
        }
    }

    /// The pair `(q, c)` of quantifier rank and largest modulus.
    pub fn cmso_rank(&self) -> (usize, u32) {
        (self.rank(), self.max_modulus())
    }

    pub fn mentions_order(&self) -> bool {
        self.any_node(&|f| matches!(f, Le(..)))
    }

    /// No set variables anywhere.
    pub fn is_first_order(&self) -> bool {
        !self.any_node(&|f| match f {
            In(..) | Sub(..) | Sing(..) | ExistsSet(..) | ForallSet(..) => true,
            Count(_, CountTarget::Set(_)) => true,
            Rel(_, args) => args.iter().any(|a| matches!(a, Var::Set(_))),
            Eq(a, b) | Le(a, b) => matches!(a, Var::Set(_)) || matches!(b, Var::Set(_)),
            _ => false,
        })
    }

    fn any_node(&self, p: &dyn Fn(&Formula) -> bool) -> bool {
        if p(self) {
            return true;
        }
        match self {
            Not(f) | Exists(_, f) | Forall(_, f) | ExistsSet(_, f) | ForallSet(_, f) => {
                f.any_node(p)
            }
            And(a, b) | Or(a, b) | Implies(a, b) => a.any_node(p) || b.any_node(p),
            _ => false,
        }
    }

    /// Relation symbols used, including unary counting targets.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Rel(r, _) | Count(_, CountTarget::Unary(r)) => {
                out.insert(r.clone());
            }
            Not(f) | Exists(_, f) | Forall(_, f) | ExistsSet(_, f) | ForallSet(_, f) => {
                f.collect_symbols(out)
            }
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            _ => {}
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        fn see(v: Var, bound: &[Var], out: &mut BTreeSet<Var>) {
            if !bound.contains(&v) {
                out.insert(v);
            }
        }
        match self {
            True | False => {}
            Rel(_, args) => args.iter().for_each(|a| see(a.clone(), bound, out)),
            Eq(a, b) | Le(a, b) => {
                see(a.clone(), bound, out);
                see(b.clone(), bound, out);
            }
            In(x, s) => {
                see(Var::Elem(x.clone()), bound, out);
                see(Var::Set(s.clone()), bound, out);
            }
            Sub(a, b) => {
                see(Var::Set(a.clone()), bound, out);
                see(Var::Set(b.clone()), bound, out);
            }
            Sing(s) | Count(_, CountTarget::Set(s)) => see(Var::Set(s.clone()), bound, out),
            Count(_, CountTarget::Unary(_)) => {}
            Not(f) => f.collect_free(bound, out),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Exists(x, f) | Forall(x, f) => {
                bound.push(Var::Elem(x.clone()));
                f.collect_free(bound, out);
                bound.pop();
            }
            ExistsSet(x, f) | ForallSet(x, f) => {
                bound.push(Var::Set(x.clone()));
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }
}

impl fmt::Display for CountTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountTarget::Set(s) | CountTarget::Unary(s) => f.write_str(s),
        }
    }
}

/// Prints with every compound subformula parenthesized, so that parsing
/// the output gives back the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Rel(r, args) => {
                let names: Vec<&str> = args.iter().map(Var::name).collect();
                write!(f, "{r}({})", names.join(","))
            }
            Eq(a, b) => write!(f, "{} = {}", a.name(), b.name()),
            Le(a, b) => write!(f, "{} <= {}", a.name(), b.name()),
            In(x, s) => write!(f, "{x} in {s}"),
            Sub(a, b) => write!(f, "{a} sub {b}"),
            Sing(s) => write!(f, "sing({s})"),
            Count(m, t) => write!(f, "C_{m}({t})"),
            Not(g) => write!(f, "~{g}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            Exists(x, g) => write!(f, "(ex {x}. {g})"),
            Forall(x, g) => write!(f, "(all {x}. {g})"),
            ExistsSet(x, g) => write!(f, "(EX {x}. {g})"),
            ForallSet(x, g) => write!(f, "(ALL {x}. {g})"),
        }
    }
}
