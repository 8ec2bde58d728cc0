use super::ast::RateExpr;
use super::{normalize, RateError, Q};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    At,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(n) => format!("'{n}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::At => "'@'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, RateError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &text[start..i];
            let n: i64 = digits.parse().map_err(|_| RateError::Syntax {
                pos: start,
                found: format!("'{digits}'"),
                expected: vec!["integer that fits in 64 bits"],
            })?;
            out.push(Token {
                tok: Tok::Int(n),
                start,
                end: i,
            });
            continue;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                start,
                end: i,
            });
            continue;
        } else {
            match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'@' => Tok::At,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                _ => {
                    let ch = text[start..].chars().next().unwrap_or('?');
                    return Err(RateError::Syntax {
                        pos: start,
                        found: format!("'{ch}'"),
                        expected: vec!["expression"],
                    });
                }
            }
        };
        i += 1;
        out.push(Token {
            tok,
            start,
            end: i,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        start: text.len(),
        end: text.len(),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }
    fn peek_at(&self, k: usize) -> &Token {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i]
    }
    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn err(&self, expected: Vec<&'static str>) -> RateError {
        let t = self.peek();
        RateError::Syntax {
            pos: t.start,
            found: describe(&t.tok),
            expected,
        }
    }
    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<Token, RateError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.err(vec![name]))
        }
    }

    fn expr(&mut self) -> Result<RateExpr, RateError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = RateExpr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = RateExpr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RateExpr, RateError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = RateExpr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = RateExpr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<RateExpr, RateError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let e = if self.peek().tok == Tok::LParen {
                self.bump();
                let r = self.rational()?;
                self.expect(Tok::RParen, "')'")?;
                r
            } else {
                self.rational()?
            };
            Ok(RateExpr::Pow(Box::new(base), e))
        } else {
            Ok(base)
        }
    }

    /// `rational := int ('/' nat)?` where `int` may carry a leading minus
    /// and the fraction bar must touch both integers.
    fn rational(&mut self) -> Result<Q, RateError> {
        let neg = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let first = match self.peek().tok {
            Tok::Int(n) => {
                let t = self.bump();
                (n, t.end)
            }
            _ => return Err(self.err(vec!["integer"])),
        };
        let mut value = Q::from_integer(if neg { -first.0 } else { first.0 });
        let slash = self.peek().clone();
        if slash.tok == Tok::Slash && slash.start == first.1 {
            let next = self.peek_at(1).clone();
            if let Tok::Int(d) = next.tok {
                if next.start == slash.end {
                    self.bump();
                    self.bump();
                    if d == 0 {
                        return Err(RateError::Syntax {
                            pos: next.start,
                            found: "'0'".into(),
                            expected: vec!["nonzero denominator"],
                        });
                    }
                    value /= Q::from_integer(d);
                }
            }
        }
        Ok(value)
    }

    fn nat(&mut self) -> Result<u32, RateError> {
        match self.peek().tok {
            Tok::Int(n) if n >= 1 && n <= u32::MAX as i64 => {
                self.bump();
                Ok(n as u32)
            }
            _ => Err(self.err(vec!["positive integer"])),
        }
    }

    fn paren_expr(&mut self) -> Result<RateExpr, RateError> {
        self.expect(Tok::LParen, "'('")?;
        let e = self.expr()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(e)
    }

    fn primary(&mut self) -> Result<RateExpr, RateError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(_) | Tok::Minus => Ok(RateExpr::Num(self.rational()?)),
            Tok::LParen => self.paren_expr(),
            Tok::Ident(name) => match name.as_str() {
                "eps" => {
                    self.bump();
                    Ok(RateExpr::Eps)
                }
                "log" => {
                    self.bump();
                    Ok(RateExpr::Log(Box::new(self.paren_expr()?)))
                }
                "abs" => {
                    self.bump();
                    Ok(RateExpr::Abs(Box::new(self.paren_expr()?)))
                }
                "exp" => {
                    self.bump();
                    let at = self.peek().clone();
                    if at.tok == Tok::At {
                        if at.start != t.end {
                            return Err(self.err(vec!["'(' directly after 'exp'"]));
                        }
                        self.bump();
                        let k = self.nat()?;
                        Ok(RateExpr::ExpIter(k, Box::new(self.paren_expr()?)))
                    } else {
                        Ok(RateExpr::Exp(Box::new(self.paren_expr()?)))
                    }
                }
                "hyper" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let a = self.rational()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(RateExpr::Hyper(a))
                }
                "comp" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(Tok::Comma, "','")?;
                    let s = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(RateExpr::Comp(Box::new(e), Box::new(s)))
                }
                _ => Err(self.err(PRIMARY_EXPECTED.to_vec())),
            },
            _ => Err(self.err(PRIMARY_EXPECTED.to_vec())),
        }
    }
}

const PRIMARY_EXPECTED: [&str; 10] = [
    "'eps'", "rational", "'log'", "'exp'", "'exp@'", "'hyper'", "'abs'", "'comp'", "'('", "'-'",
];

/// Parses text into an AST without checking fragment membership.
pub fn parse_syntax(text: &str) -> Result<RateExpr, RateError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.err(vec!["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(e)
}

/// Parses text and rejects expressions outside the decidable fragment.
///
/// Expressions whose leading term cancels below the tracked precision are
/// still accepted: they evaluate fine and only the exact oracle declines them.
pub fn parse(text: &str) -> Result<RateExpr, RateError> {
    let e = parse_syntax(text)?;
    match normalize(&e) {
        Ok(_) | Err(RateError::Indeterminate(_)) => Ok(e),
        Err(err) => Err(err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_dsl::q;

    #[test]
    fn round_trip_of_canonical_text() {
        for s in [
            "eps^(-3/2) * log(1 / eps)^2",
            "exp@2(1 / eps)",
            "exp(eps)",
            "hyper(1/2)",
            "abs(-1 * eps^-1)",
            "comp(eps^-1, eps^2)",
            "eps^-1 + eps^-2 - 3",
        ] {
            let e = parse(s).unwrap();
            assert_eq!(e.to_canonical(), s);
        }
    }

    #[test]
    fn whitespace_is_ignored() {
        let a = parse("eps ^ -1*log( 1/eps )").unwrap();
        let b = parse("eps^-1 * log(1 / eps)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rational_literals_and_division() {
        assert_eq!(parse("3/4").unwrap(), RateExpr::Num(Q::new(3, 4)));
        assert!(matches!(parse("3 / 4").unwrap(), RateExpr::Div(..)));
        assert_eq!(
            parse("eps^(-3/2)").unwrap(),
            RateExpr::Pow(Box::new(RateExpr::Eps), Q::new(-3, 2))
        );
        assert_eq!(parse("-2").unwrap(), RateExpr::Num(q(-2)));
    }

    #[test]
    fn syntax_errors_carry_position_and_expectations() {
        match parse("eps^") {
            Err(RateError::Syntax { pos, expected, .. }) => {
                assert_eq!(pos, 4);
                assert!(expected.contains(&"integer"));
            }
            other => panic!("{other:?}"),
        }
        match parse("log 1") {
            Err(RateError::Syntax { pos, expected, .. }) => {
                assert_eq!(pos, 4);
                assert_eq!(expected, vec!["'('"]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("eps)"), Err(RateError::Syntax { pos: 3, .. })));
        assert!(matches!(parse("sin(eps)"), Err(RateError::Syntax { pos: 0, .. })));
        assert!(matches!(parse("1/0"), Err(RateError::Syntax { .. })));
    }

    #[test]
    fn fragment_errors() {
        assert!(matches!(parse("log(-1 * eps^-1)"), Err(RateError::Fragment(_))));
        assert!(matches!(parse("exp(2)"), Err(RateError::Fragment(_))));
        assert!(parse("exp(eps)").is_ok());
    }
}
