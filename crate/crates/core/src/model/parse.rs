//! Line-oriented model file parser.
//!
//! ```text
//! location <id> [init] [target] [avoid]
//! clock <id>
//! param <id> <lo> <hi>
//! deadline <nat>
//! trans [<id>:] <src> <input> {<clk>,...} <guard> <dst>
//! ```
//!
//! Guards are `true` or `atom (& atom)*` with `atom := clock op expr`,
//! `expr := term (+ term)*` and `term := nat | nat * param | param`.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    AffineParamExpr, ClockId, Guard, GuardAtom, LocId, ModelError, ParamId, Parameter, Pta,
    Relation, Spec, SymbolId, Transition, GLOBAL_CLOCK,
};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    LBrace,
    RBrace,
    Comma,
    Colon,
    Amp,
    Plus,
    Star,
    Rel(Relation),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, ModelError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '&' => Some(Tok::Amp),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, col });
            i += 1;
            continue;
        }
        if c == '<' || c == '>' {
            let eq = chars.get(i + 1) == Some(&'=');
            let rel = match (c, eq) {
                ('<', false) => Relation::Lt,
                ('<', true) => Relation::Le,
                ('>', false) => Relation::Gt,
                _ => Relation::Ge,
            };
            out.push(Token {
                tok: Tok::Rel(rel),
                col,
            });
            i += if eq { 2 } else { 1 };
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<u64>().map_err(|_| ModelError::Syntax {
                line: lineno,
                column: col,
                message: format!("number out of range: {}", text),
            })?;
            out.push(Token {
                tok: Tok::Nat(n),
                col,
            });
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        return Err(ModelError::Syntax {
            line: lineno,
            column: col,
            message: format!("unexpected character '{}'", c),
        });
    }
    Ok(out)
}

/// Cursor over the tokens of one line.
struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ModelError {
        let column = self.toks.get(self.pos).map_or(self.end_col, |t| t.col);
        ModelError::Syntax {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        self.pos += 1;
        t
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ModelError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Ident(s),
                col,
            }) => {
                self.pos += 1;
                Ok((s.clone(), *col))
            }
            _ => Err(self.err(format!("expected {}", what))),
        }
    }

    fn nat(&mut self, what: &str) -> Result<u64, ModelError> {
        match self.peek() {
            Some(Tok::Nat(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err(format!("expected {}", what))),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ModelError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {}", what)))
        }
    }

    fn finish(&self) -> Result<(), ModelError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

struct RawAtom {
    clock: String,
    relation: Relation,
    terms: Vec<(u64, String, usize)>,
    constant: u64,
}

struct RawTransition {
    line: usize,
    id: Option<String>,
    source: (String, usize),
    input: String,
    resets: Vec<(String, usize)>,
    guard: Vec<RawAtom>,
    target: (String, usize),
}

fn parse_guard(cur: &mut Cursor<'_>) -> Result<Vec<RawAtom>, ModelError> {
    if cur.peek() == Some(&Tok::Ident("true".into())) {
        cur.next();
        return Ok(Vec::new());
    }
    let mut atoms = Vec::new();
    loop {
        let (clock, _) = cur.ident("clock name")?;
        let relation = match cur.next() {
            Some(Tok::Rel(r)) => *r,
            _ => {
                cur.pos -= 1;
                return Err(cur.err("expected one of <, <=, >, >="));
            }
        };
        let mut terms = Vec::new();
        let mut constant = 0u64;
        loop {
            match cur.toks.get(cur.pos).cloned() {
                Some(Token {
                    tok: Tok::Nat(n), ..
                }) => {
                    cur.pos += 1;
                    if cur.peek() == Some(&Tok::Star) {
                        cur.pos += 1;
                        let (p, col) = cur.ident("parameter name")?;
                        terms.push((n, p, col));
                    } else {
                        constant = constant
                            .checked_add(n)
                            .ok_or_else(|| cur.err("constant overflow"))?;
                    }
                }
                Some(Token {
                    tok: Tok::Ident(p),
                    col,
                }) => {
                    cur.pos += 1;
                    terms.push((1, p, col));
                }
                _ => return Err(cur.err("expected a natural number or parameter")),
            }
            if cur.peek() == Some(&Tok::Plus) {
                cur.pos += 1;
            } else {
                break;
            }
        }
        atoms.push(RawAtom {
            clock,
            relation,
            terms,
            constant,
        });
        if cur.peek() == Some(&Tok::Amp) {
            cur.pos += 1;
        } else {
            break;
        }
    }
    Ok(atoms)
}

fn parse_trans(toks: &[Token], lineno: usize, end_col: usize) -> Result<RawTransition, ModelError> {
    // The destination is the last token; everything between `}` and it is the guard.
    let (last, body) = toks.split_last().ok_or(ModelError::Syntax {
        line: lineno,
        column: end_col,
        message: "expected transition".into(),
    })?;
    let target = match &last.tok {
        Tok::Ident(s) => (s.clone(), last.col),
        _ => {
            return Err(ModelError::Syntax {
                line: lineno,
                column: last.col,
                message: "expected destination location".into(),
            })
        }
    };
    let mut cur = Cursor {
        toks: body,
        pos: 0,
        line: lineno,
        end_col: last.col,
    };
    let id = if matches!(body.get(1).map(|t| &t.tok), Some(Tok::Colon)) {
        let (id, _) = cur.ident("transition id")?;
        cur.next();
        Some(id)
    } else {
        None
    };
    let source = cur.ident("source location")?;
    let (input, _) = cur.ident("input symbol")?;
    cur.expect(Tok::LBrace, "'{'")?;
    let mut resets = Vec::new();
    if cur.peek() != Some(&Tok::RBrace) {
        loop {
            resets.push(cur.ident("clock name")?);
            if cur.peek() == Some(&Tok::Comma) {
                cur.pos += 1;
            } else {
                break;
            }
        }
    }
    cur.expect(Tok::RBrace, "'}'")?;
    let guard = parse_guard(&mut cur)?;
    cur.finish()?;
    Ok(RawTransition {
        line: lineno,
        id,
        source,
        input,
        resets,
        guard,
        target,
    })
}

/// Parses a model file into a PTA and its specification.
pub fn parse_model(text: &str) -> Result<(Pta, Spec), ModelError> {
    let mut locations: Vec<String> = Vec::new();
    let mut init: Option<LocId> = None;
    let mut targets = BTreeSet::new();
    let mut avoids = BTreeSet::new();
    let mut clocks: Vec<String> = Vec::new();
    let mut params: Vec<Parameter> = Vec::new();
    let mut deadline: Option<u64> = None;
    let mut raw_trans: Vec<RawTransition> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = tokenize(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let end_col = line.chars().count() + 1;
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: lineno,
            end_col,
        };
        let (keyword, _) = cur.ident("declaration keyword")?;
        match keyword.as_str() {
            "location" => {
                let (name, _) = cur.ident("location name")?;
                if locations.contains(&name) {
                    return Err(ModelError::semantic(
                        format!("location {}", name),
                        "duplicate declaration",
                    ));
                }
                let id = LocId(locations.len());
                locations.push(name.clone());
                let mut flags = BTreeSet::new();
                while !cur.at_end() {
                    let (flag, _) = cur.ident("location flag")?;
                    if !matches!(flag.as_str(), "init" | "target" | "avoid") {
                        cur.pos -= 1;
                        return Err(cur.err(format!("unknown location flag '{}'", flag)));
                    }
                    if !flags.insert(flag.clone()) {
                        cur.pos -= 1;
                        return Err(cur.err(format!("repeated flag '{}'", flag)));
                    }
                }
                if flags.contains("init") {
                    if init.is_some() {
                        return Err(ModelError::semantic(
                            format!("location {}", name),
                            "second init location",
                        ));
                    }
                    init = Some(id);
                }
                if flags.contains("target") {
                    targets.insert(id);
                }
                if flags.contains("avoid") {
                    avoids.insert(id);
                }
                if flags.contains("target") && flags.contains("avoid") {
                    return Err(ModelError::semantic(
                        format!("location {}", name),
                        "both target and avoid",
                    ));
                }
            }
            "clock" => {
                let (name, _) = cur.ident("clock name")?;
                cur.finish()?;
                if name == GLOBAL_CLOCK {
                    return Err(ModelError::semantic(
                        "clock x0",
                        "x0 is implicit and must not be declared",
                    ));
                }
                if clocks.contains(&name) {
                    return Err(ModelError::semantic(
                        format!("clock {}", name),
                        "duplicate declaration",
                    ));
                }
                clocks.push(name);
            }
            "param" => {
                let (name, _) = cur.ident("parameter name")?;
                let lo = cur.nat("lower bound")?;
                let hi = cur.nat("upper bound")?;
                cur.finish()?;
                if params.iter().any(|p| p.name == name) {
                    return Err(ModelError::semantic(
                        format!("param {}", name),
                        "duplicate declaration",
                    ));
                }
                if lo > hi {
                    return Err(ModelError::semantic(
                        format!("param {}", name),
                        format!("empty domain [{}, {}]", lo, hi),
                    ));
                }
                params.push(Parameter { name, lo, hi });
            }
            "deadline" => {
                let d = cur.nat("deadline")?;
                cur.finish()?;
                if deadline.replace(d).is_some() {
                    return Err(ModelError::semantic("deadline", "declared twice"));
                }
            }
            "trans" => raw_trans.push(parse_trans(&toks[1..], lineno, end_col)?),
            other => {
                return Err(ModelError::Syntax {
                    line: lineno,
                    column: toks[0].col,
                    message: format!("unknown declaration '{}'", other),
                })
            }
        }
    }

    let init = init.ok_or_else(|| ModelError::semantic("model", "no init location"))?;
    let deadline = deadline.ok_or_else(|| ModelError::semantic("model", "no deadline"))?;
    for c in &clocks {
        if params.iter().any(|p| &p.name == c) {
            return Err(ModelError::semantic(
                format!("clock {}", c),
                "name clashes with a parameter",
            ));
        }
    }

    let loc_index: BTreeMap<&str, LocId> = locations
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), LocId(i)))
        .collect();
    let clock_index = |name: &str| -> Option<ClockId> {
        if name == GLOBAL_CLOCK {
            Some(ClockId::GLOBAL)
        } else {
            clocks
                .iter()
                .position(|c| c == name)
                .map(|i| ClockId(i + 1))
        }
    };
    let param_index =
        |name: &str| -> Option<ParamId> { params.iter().position(|p| p.name == name).map(ParamId) };

    let mut alphabet: Vec<String> = Vec::new();
    let mut transitions = Vec::with_capacity(raw_trans.len());
    for (k, rt) in raw_trans.into_iter().enumerate() {
        let id = rt.id.clone().unwrap_or_else(|| format!("e{}", k + 1));
        let entity = format!("transition {} (line {})", id, rt.line);
        let loc = |(name, _): &(String, usize)| {
            loc_index.get(name.as_str()).copied().ok_or_else(|| {
                ModelError::semantic(&entity, format!("undeclared location {}", name))
            })
        };
        let source = loc(&rt.source)?;
        let target = loc(&rt.target)?;
        let input = match alphabet.iter().position(|a| *a == rt.input) {
            Some(i) => SymbolId(i),
            None => {
                alphabet.push(rt.input.clone());
                SymbolId(alphabet.len() - 1)
            }
        };
        let mut resets = BTreeSet::new();
        for (name, _) in &rt.resets {
            if name == GLOBAL_CLOCK {
                return Err(ModelError::semantic(&entity, "x0 reset forbidden"));
            }
            let c = clock_index(name).ok_or_else(|| {
                ModelError::semantic(&entity, format!("undeclared clock {}", name))
            })?;
            resets.insert(c);
        }
        let mut atoms = Vec::new();
        for ra in &rt.guard {
            let clock = clock_index(&ra.clock).ok_or_else(|| {
                ModelError::semantic(&entity, format!("undeclared clock {}", ra.clock))
            })?;
            let mut terms = Vec::new();
            for (k, p, _) in &ra.terms {
                let pid = param_index(p).ok_or_else(|| {
                    ModelError::semantic(&entity, format!("undeclared parameter {}", p))
                })?;
                terms.push((*k, pid));
            }
            atoms.push(GuardAtom {
                clock,
                relation: ra.relation,
                bound: AffineParamExpr::new(terms, ra.constant),
            });
        }
        transitions.push(Transition {
            id,
            source,
            input,
            resets,
            guard: Guard { atoms },
            target,
        });
    }

    let pta = Pta::new(locations, init, alphabet, clocks, params, transitions)?;
    let spec = Spec {
        targets,
        avoids,
        deadline,
    };
    Ok((pta, spec))
}
