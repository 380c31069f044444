//! Text format for rewrite systems.
//!
//! ```text
//! # comment
//! sig add/2 succ/1 zero/0
//! vars x y
//! rule add(zero, y) -> y
//! rule add(succ(x), y) -> succ(add(x, y))
//! ```
//!
//! `sig` and `vars` lines may repeat and are merged. An identifier in a
//! term is a variable when declared by `vars`, otherwise a symbol.

use std::fmt::Write as _;

use thiserror::Error;

use crate::term::{ESystem, Rule, Signature, Term, TermError, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Declaration {
        line: usize,
        #[source]
        source: TermError,
    },
    #[error("rule {index} (line {line}): {source}")]
    Rule {
        index: usize,
        line: usize,
        #[source]
        source: TermError,
    },
}

/// A parsed system together with the line of each rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrsFile {
    pub system: ESystem,
    pub rule_lines: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(usize),
    LParen,
    RParen,
    Comma,
    Arrow,
    Slash,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Lexer, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |i: usize, message: String| SyntaxError::Parse {
        line,
        column: col0 + i,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => toks.push((Tok::LParen, start)),
            ')' => toks.push((Tok::RParen, start)),
            ',' => toks.push((Tok::Comma, start)),
            '/' => toks.push((Tok::Slash, start)),
            '-' if chars.get(i + 1) == Some(&'>') => {
                toks.push((Tok::Arrow, start));
                i += 1;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..=i].iter().collect()), start));
            }
            _ if c.is_ascii_digit() => {
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..=i].iter().collect();
                let n = digits
                    .parse()
                    .map_err(|_| err(start, format!("number `{digits}` is too large")))?;
                toks.push((Tok::Number(n), start));
            }
            _ => return Err(err(start, format!("unexpected character `{c}`"))),
        }
        i += 1;
    }
    Ok(Lexer {
        toks: toks.into_iter().map(|(t, c)| (t, col0 + c)).collect(),
        pos: 0,
        line,
        end_col: col0 + chars.len(),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse {
            line: self.line,
            column: self.col(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn term(&mut self, vars: &VarSet) -> Result<Term, SyntaxError> {
        let name = match self.peek() {
            Some(Tok::Ident(name)) => name.clone(),
            _ => return self.fail("expected a term"),
        };
        self.pos += 1;
        if self.peek() != Some(&Tok::LParen) {
            return Ok(if vars.contains(&name) {
                Term::Var(name)
            } else {
                Term::constant(name)
            });
        }
        self.pos += 1;
        let mut children = vec![self.term(vars)?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    children.push(self.term(vars)?);
                }
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(Term::Node(name, children));
                }
                _ => return self.fail("expected `,` or `)`"),
            }
        }
    }
}

/// Parses one term; identifiers listed in `vars` become variables.
pub fn parse_term_with(text: &str, vars: &VarSet) -> Result<Term, SyntaxError> {
    let mut lx = lex(text, 1, 1)?;
    let t = lx.term(vars)?;
    if !lx.at_end() {
        return lx.fail("unexpected input after term");
    }
    Ok(t)
}

/// Parses a term and checks it against a system's signature and variables.
pub fn parse_term_for(text: &str, es: &ESystem) -> Result<Term, SyntaxError> {
    let t = parse_term_with(text, es.vars())?;
    es.check_term(&t)
        .map_err(|source| SyntaxError::Declaration { line: 1, source })?;
    Ok(t)
}

/// Parses a term treating single lowercase letters `u`..`z` as variables.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let vars = VarSet::new(["u", "v", "w", "x", "y", "z"]).expect("distinct names");
    parse_term_with(text, &vars)
}

pub fn parse_trs(text: &str) -> Result<ESystem, SyntaxError> {
    parse_trs_file(text).map(|f| f.system)
}

pub fn parse_trs_file(text: &str) -> Result<TrsFile, SyntaxError> {
    let mut sig = Signature::empty();
    let mut vars = VarSet::empty();
    let mut rule_src: Vec<(usize, usize, &str)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let keyword_len = trimmed
            .find(|c: char| c.is_whitespace())
            .unwrap_or(trimmed.len());
        let keyword = &trimmed[..keyword_len];
        let rest = &trimmed[keyword_len..];
        let rest_col = indent + keyword_len + 1;
        match keyword {
            "sig" => {
                let mut lx = lex(rest, line, rest_col)?;
                while !lx.at_end() {
                    let col = lx.col();
                    let name = match lx.next() {
                        Some(Tok::Ident(name)) => name,
                        _ => {
                            lx.pos -= 1;
                            return lx.fail("expected a symbol name");
                        }
                    };
                    lx.expect(Tok::Slash, "`/` after symbol name")?;
                    let arity = match lx.next() {
                        Some(Tok::Number(a)) => a,
                        _ => {
                            lx.pos -= 1;
                            return lx.fail("expected an arity");
                        }
                    };
                    sig.push(name, arity).map_err(|source| SyntaxError::Parse {
                        line,
                        column: col,
                        message: source.to_string(),
                    })?;
                }
            }
            "vars" => {
                let mut lx = lex(rest, line, rest_col)?;
                while !lx.at_end() {
                    let col = lx.col();
                    match lx.next() {
                        Some(Tok::Ident(name)) => {
                            vars.push(name).map_err(|source| SyntaxError::Parse {
                                line,
                                column: col,
                                message: source.to_string(),
                            })?
                        }
                        _ => {
                            lx.pos -= 1;
                            return lx.fail("expected a variable name");
                        }
                    }
                }
            }
            "rule" => rule_src.push((line, rest_col, rest)),
            _ => {
                return Err(SyntaxError::Parse {
                    line,
                    column: indent + 1,
                    message: format!("unknown declaration `{keyword}`, expected sig, vars or rule"),
                })
            }
        }
    }

    if let Some(v) = vars.names().iter().find(|v| sig.index_of(v).is_some()) {
        return Err(SyntaxError::Declaration {
            line: 0,
            source: TermError::VariableClashesWithSymbol(v.clone()),
        });
    }

    let mut rules = Vec::new();
    let mut rule_lines = Vec::new();
    for (index, (line, col, src)) in rule_src.into_iter().enumerate() {
        let mut lx = lex(src, line, col)?;
        let lhs = lx.term(&vars)?;
        lx.expect(Tok::Arrow, "`->`")?;
        let rhs = lx.term(&vars)?;
        if !lx.at_end() {
            return lx.fail("unexpected input after rule");
        }
        let wrap = |source| SyntaxError::Rule {
            index,
            line,
            source,
        };
        lhs.check(&sig, &vars).map_err(wrap)?;
        rhs.check(&sig, &vars).map_err(wrap)?;
        rules.push(Rule::new(lhs, rhs).map_err(wrap)?);
        rule_lines.push(line);
    }

    let system = ESystem::new(sig, vars, rules).map_err(|source| SyntaxError::Declaration {
        line: 0,
        source,
    })?;
    Ok(TrsFile { system, rule_lines })
}

/// Prints a system in the format accepted by [`parse_trs`].
pub fn print_trs(es: &ESystem) -> String {
    let mut out = String::new();
    if !es.sig().is_empty() {
        out.push_str("sig");
        for (name, arity) in es.sig().entries() {
            let _ = write!(out, " {name}/{arity}");
        }
        out.push('\n');
    }
    if !es.vars().is_empty() {
        out.push_str("vars");
        for name in es.vars().names() {
            let _ = write!(out, " {name}");
        }
        out.push('\n');
    }
    for rule in es.rules() {
        let _ = writeln!(out, "rule {} -> {}", rule.lhs, rule.rhs);
    }
    out
}
