use std::sync::Arc;

use crate::diag::SourceSpan;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Unsigned decimal literal, kept as written.
    Number(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Dot,
    Eq,
    Slash,
    Arrow,
    /// Any character the grammar does not use.
    Invalid(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Invalid(c) => format!("`{c}`"),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Split `text` into tokens. `//` comments and whitespace are dropped; the
/// stream always ends with `Eof`.
pub fn tokenize(text: &str, file: &Arc<str>) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        let begin = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[begin..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if matches!(chars.get(i), Some('e' | 'E')) {
                let mut j = i + 1;
                if matches!(chars.get(j), Some('+' | '-')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(char::is_ascii_digit) {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            Tok::Number(chars[begin..i].iter().collect())
        } else {
            i += 1;
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '=' => Tok::Eq,
                '/' => Tok::Slash,
                '-' if chars.get(i) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                other => Tok::Invalid(other),
            }
        };
        col += (i - begin) as u32;
        out.push(Token { tok, span: SourceSpan::new(file.clone(), start, (line, col)) });
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan::new(file.clone(), (line, col), (line, col)) });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, &Arc::from("t")).into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers_identifiers_and_arrows() {
        assert_eq!(
            toks("a.b -> c 12.5e-3 Hz // trailing\n/ 4;"),
            vec![
                Tok::Ident("a".into()),
                Tok::Dot,
                Tok::Ident("b".into()),
                Tok::Arrow,
                Tok::Ident("c".into()),
                Tok::Number("12.5e-3".into()),
                Tok::Ident("Hz".into()),
                Tok::Slash,
                Tok::Number("4".into()),
                Tok::Semi,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn spans_are_one_based() {
        let t = tokenize("x\n  yy", &Arc::from("f"));
        assert_eq!((t[1].span.start_line, t[1].span.start_col), (2, 3));
        assert_eq!((t[1].span.end_line, t[1].span.end_col), (2, 5));
    }

    #[test]
    fn stray_characters_become_invalid_tokens() {
        assert_eq!(toks("#-"), vec![Tok::Invalid('#'), Tok::Invalid('-'), Tok::Eof]);
    }
}
