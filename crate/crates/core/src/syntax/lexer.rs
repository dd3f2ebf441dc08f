use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    Amp,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Caret,
    Star,
    At,
    Arrow,
    BackArrow,
    Turnstile,
    Plus,
    Minus,
    Eq,
    Semi,
    Colon,
    Hash,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            other => format!("`{}`", punct(other)),
        }
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::Amp => "&",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::Comma => ",",
        Tok::Caret => "^",
        Tok::Star => "*",
        Tok::At => "@",
        Tok::Arrow => "->",
        Tok::BackArrow => "<-",
        Tok::Turnstile => "|-",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Eq => "=",
        Tok::Semi => ";",
        Tok::Colon => ":",
        Tok::Hash => "#",
        Tok::Ident(_) | Tok::Number(_) => "",
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: l0, col: c0 });
            *i += width;
            *col += width;
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
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
            }
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned { tok: Tok::Number(s), line: l0, col: c0 });
            }
            '|' if chars.get(i + 1) == Some(&'-') => push(Tok::Turnstile, 2, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'-') => push(Tok::BackArrow, 2, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '^' => push(Tok::Caret, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '@' => push(Tok::At, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '#' => push(Tok::Hash, 1, &mut i, &mut col),
            other => {
                return Err(SyntaxError::Parse { line, col, msg: format!("unexpected character `{other}`") });
            }
        }
    }
    Ok(out)
}
