use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    Semi,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub pos: Pos,
}

impl Token {
    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Eof => "end of input".to_string(),
            _ => self.text.clone(),
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    while let Some(&(offset, c)) = chars.peek() {
        let pos = Pos {
            line,
            column,
            offset,
        };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
            continue;
        }

        let single = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            ';' => Some(TokenKind::Semi),
            _ => None,
        };
        if let Some(kind) = single {
            chars.next();
            column += 1;
            tokens.push(Token {
                kind,
                text: c.to_string(),
                pos,
            });
            continue;
        }

        let mut text = String::new();
        let mut take = |text: &mut String, pred: &dyn Fn(char) -> bool| {
            while let Some(&(_, c)) = chars.peek() {
                if !pred(c) {
                    break;
                }
                text.push(c);
                chars.next();
                column += 1;
            }
        };

        if c.is_ascii_alphabetic() || c == '_' {
            take(&mut text, &|c| c.is_ascii_alphanumeric() || c == '_');
            tokens.push(Token {
                kind: TokenKind::Ident(text.clone()),
                text,
                pos,
            });
        } else if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            take(&mut text, &|c| {
                c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')
            });
            let value: f64 = text.parse().map_err(|_| ParseError {
                line: pos.line,
                column: pos.column,
                message: format!("malformed number `{text}`"),
                token: text.clone(),
            })?;
            tokens.push(Token {
                kind: TokenKind::Number(value),
                text,
                pos,
            });
        } else {
            chars.next();
            return Err(ParseError {
                line: pos.line,
                column: pos.column,
                message: format!("unexpected character `{c}`"),
                token: c.to_string(),
            });
        }
    }

    let offset = src.len();
    tokens.push(Token {
        kind: TokenKind::Eof,
        text: String::new(),
        pos: Pos {
            line,
            column,
            offset,
        },
    });
    Ok(tokens)
}
