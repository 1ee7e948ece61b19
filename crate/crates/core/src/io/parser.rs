//! Lexer and recursive-descent parser for the `.wfts` model format.
//!
//! ```text
//! model      := "features" "{" [id ("," id)*] "}" constraint? states init trans*
//! constraint := "constraint" expr
//! states     := "states" "{" id ("," id)* "}"
//! init       := "init" "{" id ("," id)* "}"
//! trans      := "trans" id "->" id ("[" expr "]")? ("action" "=" id)?
//!               "weight" "=" rational ("length" "=" int)?
//! expr       := or;  or := and ("||" and)*;  and := unary ("&&" unary)*
//! unary      := "!" unary | "(" expr ")" | id | "true" | "false"
//! rational   := ["+"|"-"] digits ["." digits | "/" digits]
//! ```
//!
//! `#` starts a comment running to the end of the line.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::feature::{FeatureError, FeatureExpr, FeatureModel};
use crate::model::{ModelError, StateId, Transition, Weight, Wfts, DEFAULT_ACTION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Arrow,
    Eq,
    OrOr,
    AndAnd,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::OrOr => f.write_str("`||`"),
            Tok::AndAnd => f.write_str("`&&`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

fn model_err(pos: Pos, e: impl Into<ModelError>) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        kind: ParseErrorKind::Model(e.into()),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let peek = chars.get(i + 1).copied();
        let start = i;
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            i += 1;
            loop {
                match chars.get(i) {
                    Some(&d) if word(d) => i += 1,
                    // a dash continues an identifier only between word chars,
                    // so `a->b` still lexes as `a`, `->`, `b`
                    Some('-') if chars.get(i + 1).is_some_and(|&d| word(d)) => i += 1,
                    _ => break,
                }
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit()
            || ((c == '-' || c == '+') && peek.is_some_and(|d| d.is_ascii_digit()))
        {
            i += 1;
            let digits = |i: &mut usize| {
                while chars.get(*i).is_some_and(|d| d.is_ascii_digit()) {
                    *i += 1;
                }
            };
            digits(&mut i);
            if matches!(chars.get(i), Some('.') | Some('/'))
                && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
            {
                i += 1;
                digits(&mut i);
            }
            Tok::Number(chars[start..i].iter().collect())
        } else {
            let (tok, len) = match (c, peek) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('|', Some('|')) => (Tok::OrOr, 2),
                ('&', Some('&')) => (Tok::AndAnd, 2),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('=', _) => (Tok::Eq, 1),
                ('!', _) => (Tok::Bang, 1),
                _ => return Err(syntax(pos, format!("unexpected character `{c}`"))),
            };
            i += len;
            tok
        };
        col += i - start;
        toks.push((tok, pos));
    }
    toks.push((Tok::Eof, Pos { line, col }));
    Ok(toks)
}

/// Parses an exact rational from `[sign] digits [. digits | / digits]`.
pub(crate) fn parse_rational(text: &str) -> Option<Weight> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let int = |s: &str| -> Option<i64> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let den = int(den)?;
        if den.is_zero() {
            return None;
        }
        Weight::new(int(num)?, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        let scale = 10i64.checked_pow(u32::try_from(frac.len()).ok()?)?;
        let numer = int(whole)?.checked_mul(scale)?.checked_add(int(frac)?)?;
        Weight::new(numer, scale)
    } else {
        Weight::from_integer(int(body)?)
    };
    Some(if negative { -value } else { value })
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(pos)
        } else {
            Err(syntax(pos, format!("expected {want}, found {tok}")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Ident(s) if s == kw => Ok(pos),
            other => Err(syntax(pos, format!("expected `{kw}`, found {other}"))),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (other, pos) => Err(syntax(pos, format!("expected identifier, found {other}"))),
        }
    }

    fn id_list(&mut self, allow_empty: bool) -> Result<Vec<(String, Pos)>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut ids = Vec::new();
        if allow_empty && *self.peek() == Tok::RBrace {
            self.bump();
            return Ok(ids);
        }
        loop {
            ids.push(self.ident()?);
            match self.bump() {
                (Tok::Comma, _) => continue,
                (Tok::RBrace, _) => return Ok(ids),
                (other, pos) => {
                    return Err(syntax(pos, format!("expected `,` or `}}`, found {other}")))
                }
            }
        }
    }

    fn expr(&mut self) -> Result<FeatureExpr, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            lhs = lhs | self.conj()?;
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<FeatureExpr, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            lhs = lhs & self.unary()?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FeatureExpr, ParseError> {
        match self.bump() {
            (Tok::Bang, _) => Ok(!self.unary()?),
            (Tok::LParen, _) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            (Tok::Ident(s), _) if s == "true" => Ok(FeatureExpr::True),
            (Tok::Ident(s), _) if s == "false" => Ok(FeatureExpr::False),
            (Tok::Ident(s), _) => Ok(FeatureExpr::Var(s)),
            (other, pos) => Err(syntax(pos, format!("expected expression, found {other}"))),
        }
    }

    fn number(&mut self) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Number(s), pos) => Ok((s, pos)),
            (other, pos) => Err(syntax(pos, format!("expected number, found {other}"))),
        }
    }
}

fn check_vars(e: &FeatureExpr, fm: &FeatureModel, pos: Pos) -> Result<(), ParseError> {
    fm.check_expr(e).map_err(|err| model_err(pos, err))
}

/// Parses and validates a model document.
pub fn parse(src: &str) -> Result<Wfts, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };

    let features_pos = p.keyword("features")?;
    let features: Vec<String> = p.id_list(true)?.into_iter().map(|(s, _)| s).collect();
    let (constraint, constraint_pos) = if p.is_keyword("constraint") {
        p.bump();
        let pos = p.pos();
        (p.expr()?, pos)
    } else {
        (FeatureExpr::True, features_pos)
    };
    // check variables against the declared names before enumeration so the
    // error points at the constraint
    let declared = FeatureModel::unconstrained(features.iter().cloned())
        .map_err(|e| model_err(features_pos, e))?;
    check_vars(&constraint, &declared, constraint_pos)?;
    let fm = FeatureModel::new(features, constraint).map_err(|e| {
        let pos = if e == FeatureError::NoValidProducts { constraint_pos } else { features_pos };
        model_err(pos, e)
    })?;

    p.keyword("states")?;
    let mut states = Vec::new();
    let mut index: HashMap<String, StateId> = HashMap::new();
    for (name, pos) in p.id_list(false)? {
        if index.contains_key(&name) {
            return Err(model_err(pos, ModelError::DuplicateState(name)));
        }
        index.insert(name.clone(), StateId(states.len()));
        states.push(name);
    }
    let lookup = |name: String, pos: Pos| {
        index
            .get(&name)
            .copied()
            .ok_or_else(|| model_err(pos, ModelError::UndeclaredState(name)))
    };

    p.keyword("init")?;
    let initial = p
        .id_list(false)?
        .into_iter()
        .map(|(s, pos)| lookup(s, pos))
        .collect::<Result<Vec<_>, _>>()?;

    let mut transitions = Vec::new();
    while p.is_keyword("trans") {
        p.bump();
        let (src, src_pos) = p.ident()?;
        let source = lookup(src, src_pos)?;
        p.expect(Tok::Arrow)?;
        let (tgt, tgt_pos) = p.ident()?;
        let target = lookup(tgt, tgt_pos)?;
        let guard = if *p.peek() == Tok::LBracket {
            p.bump();
            let pos = p.pos();
            let e = p.expr()?;
            p.expect(Tok::RBracket)?;
            check_vars(&e, &fm, pos)?;
            e
        } else {
            FeatureExpr::True
        };
        let action = if p.is_keyword("action") {
            p.bump();
            p.expect(Tok::Eq)?;
            p.ident()?.0
        } else {
            DEFAULT_ACTION.to_string()
        };
        p.keyword("weight")?;
        p.expect(Tok::Eq)?;
        let (text, pos) = p.number()?;
        let weight =
            parse_rational(&text).ok_or_else(|| syntax(pos, format!("invalid weight `{text}`")))?;
        let length = if p.is_keyword("length") {
            p.bump();
            p.expect(Tok::Eq)?;
            let (text, pos) = p.number()?;
            match text.parse::<u32>() {
                Ok(n) if n >= 1 => n,
                _ => return Err(syntax(pos, format!("length must be a positive integer, found `{text}`"))),
            }
        } else {
            1
        };
        transitions.push(Transition {
            source,
            action,
            target,
            guard,
            weight,
            length,
        });
    }
    if *p.peek() != Tok::Eof {
        let (tok, pos) = p.bump();
        return Err(syntax(pos, format!("expected `trans` or end of input, found {tok}")));
    }
    Wfts::new(states, transitions, initial, fm).map_err(|e| model_err(features_pos, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "features { G, A }\nstates { S0, S2, P1, AR }\ninit { S0 }\n";

    fn one(line: &str) -> Transition {
        let w = parse(&format!("{HEADER}{line}\n")).unwrap();
        w.transitions()[0].clone()
    }

    #[test]
    fn length_annotated_transition() {
        let t = one("trans P1 -> AR [true] weight=40 length=3");
        assert_eq!(t.action, "tau");
        assert_eq!(t.guard, FeatureExpr::True);
        assert_eq!(t.weight, Weight::from_integer(40));
        assert_eq!(t.length, 3);
    }

    #[test]
    fn guarded_negative_weight() {
        let t = one("trans S0 -> S2 [G || A] weight=-1");
        assert_eq!(t.guard, FeatureExpr::var("G") | FeatureExpr::var("A"));
        assert_eq!(t.weight, Weight::from_integer(-1));
        assert_eq!(t.length, 1);
    }

    #[test]
    fn decimal_and_fraction_weights_are_exact() {
        assert_eq!(parse_rational("13.5"), Some(Weight::new(27, 2)));
        assert_eq!(parse_rational("-2"), Some(Weight::from_integer(-2)));
        assert_eq!(parse_rational("+0.05"), Some(Weight::new(1, 20)));
        assert_eq!(parse_rational("-1/3"), Some(Weight::new(-1, 3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("99999999999999999999"), None);
    }

    #[test]
    fn precedence_not_and_or() {
        let t = one("trans S0 -> S2 [!G && A || G] weight=0");
        let (g, a) = (FeatureExpr::var("G"), FeatureExpr::var("A"));
        assert_eq!(t.guard, (!g.clone() & a) | g);
    }

    #[test]
    fn action_and_comments() {
        let t = one("trans S0 -> S2 action=grant weight=1 # trailing\n# full line");
        assert_eq!(t.action, "grant");
    }

    #[test]
    fn empty_state_list_is_a_syntax_error() {
        let err = parse("features { A }\nstates { }\ninit { x }\n").unwrap_err();
        assert_eq!((err.line, err.col), (2, 10));
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse(&format!("{HEADER}trans S0 -> Nowhere weight=1\n")).unwrap_err();
        assert_eq!((err.line, err.col), (4, 13));
        assert_eq!(
            err.kind,
            ParseErrorKind::Model(ModelError::UndeclaredState("Nowhere".into()))
        );

        let err = parse(&format!("{HEADER}trans S0 -> S2 [X] weight=1\n")).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::Model(ModelError::Feature(FeatureError::UnknownFeature("X".into())))
        );

        let err = parse("features { A }\nstates { a, a }\ninit { a }\n").unwrap_err();
        assert_eq!((err.line, err.col), (2, 13));

        let err = parse("features { A }\nconstraint A && !A\nstates { a }\ninit { a }\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(
            err.kind,
            ParseErrorKind::Model(ModelError::Feature(FeatureError::NoValidProducts))
        );

        let err = parse("features { A }\nstates { a }\ninit { a }\ntrans a -> a weight=1 length=0")
            .unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));

        let err = parse("features { A } states { a } init { a } $").unwrap_err();
        assert_eq!(err.to_string(), "1:40: unexpected character `$`");
    }

    #[test]
    fn dashed_identifiers_and_tight_arrows() {
        let w = parse("features { }\nstates { Pickup-1, b }\ninit { Pickup-1 }\ntrans Pickup-1->b weight=1\n")
            .unwrap();
        assert_eq!(w.states(), &["Pickup-1", "b"]);
        assert_eq!(w.feature_model().product_count(), 1);
    }
}
