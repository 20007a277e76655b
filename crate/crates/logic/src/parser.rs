use oimso_core::Vocabulary;

use crate::{CountTarget, Formula, LogicError, Result, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Arrow,
    Eq,
    Le,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'=' => Tok::Eq,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Le
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                return Err(LogicError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

const KEYWORDS: &[&str] = &["ex", "all", "EX", "ALL", "in", "sub", "sing", "true", "false"];

fn is_elem_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
}

fn counting_modulus(s: &str) -> Option<u32> {
    s.strip_prefix("C_").and_then(|d| {
        if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) {
            d.parse().ok()
        } else {
            None
        }
    })
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    voc: &'a Vocabulary,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(LogicError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn set_var(&mut self) -> Result<String> {
        let at = self.offset();
        let s = self.ident("set variable")?;
        if is_elem_name(&s) {
            return Err(LogicError::Syntax {
                pos: at,
                msg: format!("`{s}` is not a set variable (set variables are uppercase)"),
            });
        }
        Ok(s)
    }

    fn term(&mut self) -> Result<Var> {
        let s = self.ident("variable")?;
        Ok(if is_elem_name(&s) {
            Var::Elem(s)
        } else {
            Var::Set(s)
        })
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(q)) if matches!(q.as_str(), "ex" | "all" | "EX" | "ALL") => {
                let q = q.clone();
                self.pos += 1;
                let at = self.offset();
                let x = self.ident("quantified variable")?;
                let set = q.chars().next().unwrap().is_ascii_uppercase();
                if set == is_elem_name(&x) {
                    return Err(LogicError::Syntax {
                        pos: at,
                        msg: format!("`{q}` cannot bind `{x}`"),
                    });
                }
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = self.implication()?;
                Ok(match q.as_str() {
                    "ex" => Formula::exists(&x, body),
                    "all" => Formula::forall(&x, body),
                    "EX" => Formula::exists_set(&x, body),
                    _ => Formula::forall_set(&x, body),
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) if s == "true" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(s)) if s == "sing" && self.peek2() == Some(&Tok::LParen) => {
                self.pos += 2;
                let x = self.set_var()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::Sing(x))
            }
            Some(Tok::Ident(s))
                if counting_modulus(&s).is_some() && self.peek2() == Some(&Tok::LParen) =>
            {
                let m = counting_modulus(&s).unwrap();
                if m == 0 {
                    return self.err("modulus must be positive");
                }
                self.pos += 2;
                let name = self.ident("counting target")?;
                self.expect(Tok::RParen, "`)`")?;
                let target = match self.voc.arity(&name) {
                    Some(1) => CountTarget::Unary(name),
                    Some(_) => return Err(LogicError::CountingArity(name)),
                    None if !is_elem_name(&name) => CountTarget::Set(name),
                    None => {
                        return Err(LogicError::Syntax {
                            pos: at,
                            msg: format!("cannot count element variable `{name}`"),
                        })
                    }
                };
                Ok(Formula::Count(m, target))
            }
            Some(Tok::Ident(r)) if self.peek2() == Some(&Tok::LParen) => {
                if KEYWORDS.contains(&r.as_str()) {
                    return self.err(format!("unexpected keyword `{r}`"));
                }
                self.pos += 2;
                let mut args = vec![self.term()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen, "`)` or `,`")?;
                match self.voc.arity(&r) {
                    None => Err(LogicError::UnknownSymbol(r)),
                    Some(k) if k != args.len() => Err(LogicError::ArityMismatch {
                        symbol: r,
                        expected: k,
                        got: args.len(),
                    }),
                    Some(_) => Ok(Formula::Rel(r, args)),
                }
            }
            Some(Tok::Ident(_)) => {
                let lhs = self.term()?;
                match self.bump() {
                    Some(Tok::Eq) => Ok(Formula::Eq(lhs, self.term()?)),
                    Some(Tok::Le) => Ok(Formula::Le(lhs, self.term()?)),
                    Some(Tok::Ident(k)) if k == "in" => match lhs {
                        Var::Elem(x) => Ok(Formula::In(x, self.set_var()?)),
                        Var::Set(_) => Err(LogicError::Syntax {
                            pos: at,
                            msg: "left side of `in` must be an element variable".into(),
                        }),
                    },
                    Some(Tok::Ident(k)) if k == "sub" => match lhs {
                        Var::Set(x) => Ok(Formula::Sub(x, self.set_var()?)),
                        Var::Elem(_) => Err(LogicError::Syntax {
                            pos: at,
                            msg: "left side of `sub` must be a set variable".into(),
                        }),
                    },
                    _ => {
                        self.pos -= 1;
                        self.err("expected `=`, `<=`, `in` or `sub`")
                    }
                }
            }
            _ => self.err("expected a formula"),
        }
    }
}

/// Parses `text` against `voc`. Grammar (loosest binding first):
/// `->` (right associative), `|`, `&`, `~`, then quantifiers
/// `ex x.`, `all x.`, `EX X.`, `ALL X.` whose scope extends as far right as
/// possible, and atoms `R(t,..)`, `t = t`, `t <= t`, `x in X`, `X sub Y`,
/// `sing(X)`, `C_m(X)`, `true`, `false`.
pub fn parse_formula(text: &str, voc: &Vocabulary) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
        voc,
    };
    let f = p.implication()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}
