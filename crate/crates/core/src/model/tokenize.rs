use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("unterminated comment starting on line {0}")]
    UnterminatedComment(usize),
    #[error("unterminated string literal on line {0}")]
    UnterminatedString(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub text: String,
    pub line: usize,
}

impl Token {
    pub fn is_word(&self) -> bool {
        is_word(&self.text)
    }
}

pub(crate) fn is_word(text: &str) -> bool {
    text.chars()
        .next()
        .is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Splits source text into tokens. Comments and whitespace are dropped,
/// string and char literals stay whole (quotes included), and every other
/// punctuation character is its own token.
pub fn tokenize(source: &str) -> Result<Vec<String>, TokenizeError> {
    Ok(lex(source)?.into_iter().map(|t| t.text).collect())
}

pub(crate) fn lex(source: &str) -> Result<Vec<Token>, TokenizeError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut i = 0usize;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            let start_line = line;
            i += 2;
            loop {
                match chars.get(i) {
                    None => return Err(TokenizeError::UnterminatedComment(start_line)),
                    Some('*') if chars.get(i + 1) == Some(&'/') => {
                        i += 2;
                        break;
                    }
                    Some('\n') => {
                        line += 1;
                        i += 1;
                    }
                    Some(_) => i += 1,
                }
            }
        } else if c == '"' && chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"') {
            // Text block: may span lines.
            let start = i;
            let start_line = line;
            i += 3;
            loop {
                match chars.get(i) {
                    None => return Err(TokenizeError::UnterminatedString(start_line)),
                    Some('\\') => i += 2,
                    Some('"') if chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"') => {
                        i += 3;
                        break;
                    }
                    Some('\n') => {
                        line += 1;
                        i += 1;
                    }
                    Some(_) => i += 1,
                }
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect(),
                line: start_line,
            });
        } else if c == '"' || c == '\'' {
            let start = i;
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(TokenizeError::UnterminatedString(line)),
                    Some('\\') => i += 2,
                    Some(&q) if q == c => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            let end = i.min(chars.len());
            tokens.push(Token {
                text: chars[start..end].iter().collect(),
                line,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (is_ident_char(chars[i]) || chars[i] == '.') {
                i += 1;
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect(),
                line,
            });
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect(),
                line,
            });
        } else {
            tokens.push(Token {
                text: c.to_string(),
                line,
            });
            i += 1;
        }
    }
    Ok(tokens)
}
