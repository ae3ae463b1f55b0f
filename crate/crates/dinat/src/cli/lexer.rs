use std::fmt;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Comma,
    Colon,
    Dot,
    Star,
    Tilde,
    Plus,
    Minus,
    Arrow,
    Turnstile,
    Caret,
    One,
    Ident(String),
    /// `:reject`, `:for`, `:goal`.
    Keyword(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::Star => "`*`",
            Tok::Tilde => "`~`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Arrow => "`=>`",
            Tok::Turnstile => "`|-`",
            Tok::Caret => "`^`",
            Tok::One => "`1`",
            Tok::Ident(n) => return write!(f, "`{n}`"),
            Tok::Keyword(k) => return write!(f, "`:{k}`"),
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const KEYWORDS: [&str; 3] = ["reject", "for", "goal"];

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '-'
}

/// Splits the input into tokens; `;` starts a comment running to end of line.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, n: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: l0, col: c0 });
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '[' => push(Tok::LBrack, 1, &mut i, &mut col),
            ']' => push(Tok::RBrack, 1, &mut i, &mut col),
            '<' => push(Tok::Lt, 1, &mut i, &mut col),
            '>' => push(Tok::Gt, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '~' => push(Tok::Tilde, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '^' => push(Tok::Caret, 1, &mut i, &mut col),
            '1' => push(Tok::One, 1, &mut i, &mut col),
            '=' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '|' if chars.get(i + 1) == Some(&'-') => push(Tok::Turnstile, 2, &mut i, &mut col),
            ':' => {
                let mut j = i + 1;
                while j < chars.len() && ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i + 1..j].iter().collect();
                if KEYWORDS.contains(&word.as_str()) {
                    push(Tok::Keyword(word), j - i, &mut i, &mut col);
                } else {
                    push(Tok::Colon, 1, &mut i, &mut col);
                }
            }
            c if ident_start(c) => {
                let mut j = i;
                while j < chars.len() && ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                push(Tok::Ident(word), j - i, &mut i, &mut col);
            }
            c => return Err(ParseError::Lex { line, col, ch: c }),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_sequent_punctuation() {
        let toks: Vec<Tok> = lex("{[x: C^op] k: P(~x) |- T => X'}").unwrap().into_iter().map(|t| t.tok).collect();
        assert!(toks.contains(&Tok::Turnstile));
        assert!(toks.contains(&Tok::Arrow));
        assert!(toks.contains(&Tok::Ident("X'".into())));
        assert!(toks.contains(&Tok::Caret));
    }

    #[test]
    fn keywords_need_a_known_word() {
        let toks: Vec<Tok> = lex(":reject x:C").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(toks[0], Tok::Keyword("reject".into()));
        assert_eq!(toks[2], Tok::Colon);
    }

    #[test]
    fn reports_position_of_bad_character() {
        match lex("(cat C)\n  $") {
            Err(ParseError::Lex { line, col, ch }) => assert_eq!((line, col, ch), (2, 3, '$')),
            other => panic!("{other:?}"),
        }
    }
}
