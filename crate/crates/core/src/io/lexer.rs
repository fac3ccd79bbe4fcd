// SPDX-License-Identifier: Apache-2.0
//! Tokeniser for the `.pgr` text format.

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Bang,
    Dash,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Dash => "`-`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Characters allowed in bare identifiers and labels.
pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.' || (!c.is_ascii() && !c.is_whitespace())
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let src = src.replace("\r\n", "\n").replace('\r', "\n");
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok| out.push(Token { tok, line: l0, col: c0 });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' => push(Tok::LBrace),
            '}' => push(Tok::RBrace),
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '[' => push(Tok::LBracket),
            ']' => push(Tok::RBracket),
            ',' => push(Tok::Comma),
            ';' => push(Tok::Semi),
            ':' => push(Tok::Colon),
            '!' => push(Tok::Bang),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow);
                    i += 2;
                    col += 2;
                    continue;
                }
                push(Tok::Dash);
            }
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                let mut width = 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(ParseError::new(l0, c0, "unterminated string"));
                        }
                        Some('"') => {
                            j += 1;
                            width += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                Some('n') => s.push('\n'),
                                _ => return Err(ParseError::new(line, col + width, "bad escape in string")),
                            }
                            j += 2;
                            width += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                            width += 1;
                        }
                    }
                }
                push(Tok::Str(s));
                i = j;
                col += width;
                continue;
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = if word.chars().all(|c| c.is_ascii_digit()) {
                    match word.parse() {
                        Ok(n) => Tok::Int(n),
                        Err(_) => return Err(ParseError::new(l0, c0, format!("number {word} is too large"))),
                    }
                } else {
                    Tok::Ident(word)
                };
                out.push(Token { tok, line: l0, col: c0 });
                continue;
            }
            other => return Err(ParseError::new(l0, c0, format!("unexpected character {other:?}"))),
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
