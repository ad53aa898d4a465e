use crate::error::{Error, Result};

/// Byte offset into the source, used to report positions.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Mark(usize);

/// Whitespace-skipping scanner over one logical value. `line` and `column`
/// locate the first byte of `src` in the enclosing document.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

const MAX_LIST: usize = 1 << 16;

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str, line: usize, column: usize) -> Self {
        Cursor { src, pos: 0, line, column }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub(crate) fn mark(&mut self) -> Mark {
        self.skip_ws();
        Mark(self.pos)
    }

    pub(crate) fn error_at(&self, at: Mark, message: String) -> Error {
        let before = &self.src[..at.0];
        let line = self.line + before.matches('\n').count();
        let column = match before.rfind('\n') {
            Some(nl) => before[nl + 1..].chars().count() + 1,
            None => self.column + before.chars().count(),
        };
        Error::Parse { line, column, message }
    }

    pub(crate) fn wrap(&self, at: Mark, err: Error) -> Error {
        match err {
            Error::Parse { .. } => err,
            other => self.error_at(at, other.to_string()),
        }
    }

    fn error_here(&mut self, message: String) -> Error {
        let m = self.mark();
        self.error_at(m, message)
    }

    fn describe_next(&self) -> String {
        match self.rest().chars().next() {
            Some(ch) => format!("`{ch}`"),
            None => "end of input".into(),
        }
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos < self.src.len() {
            let found = self.describe_next();
            return Err(self.error_here(format!("unexpected {found} after value")));
        }
        Ok(())
    }

    pub(crate) fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, ch: char) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            let found = self.describe_next();
            Err(self.error_here(format!("expected `{ch}`, found {found}")))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 || !self.rest().starts_with(|ch: char| ch.is_ascii_alphabetic()) {
            let found = self.describe_next();
            return Err(self.error_here(format!("expected a name, found {found}")));
        }
        let word = self.rest()[..len].to_string();
        self.pos += len;
        Ok(word)
    }

    pub(crate) fn peek_number(&mut self) -> bool {
        self.skip_ws();
        self.rest().starts_with(|ch: char| ch.is_ascii_digit() || ch == '-' || ch == '+' || ch == '.')
    }

    pub(crate) fn peek_nested_list(&mut self) -> bool {
        self.skip_ws();
        let r = self.rest();
        r.starts_with('[') && r[1..].trim_start().starts_with('[')
    }

    pub(crate) fn number(&mut self) -> Result<f64> {
        let at = self.mark();
        let len = self
            .rest()
            .find(|ch: char| !(ch.is_ascii_digit() || matches!(ch, '-' | '+' | '.' | 'e' | 'E')))
            .unwrap_or(self.rest().len());
        let token = &self.rest()[..len];
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += len;
                Ok(v)
            }
            Ok(_) => Err(self.error_at(at, format!("number `{token}` is not finite"))),
            Err(_) => {
                let word_len = self
                    .rest()
                    .find(|ch: char| !(ch.is_alphanumeric() || matches!(ch, '-' | '+' | '.' | '_')))
                    .unwrap_or(self.rest().len());
                let found = if word_len == 0 { self.describe_next() } else { format!("`{}`", &self.rest()[..word_len]) };
                Err(self.error_at(at, format!("expected a number, found {found}")))
            }
        }
    }

    pub(crate) fn uint(&mut self) -> Result<usize> {
        let at = self.mark();
        let len = self.rest().find(|ch: char| !ch.is_ascii_digit()).unwrap_or(self.rest().len());
        let token = &self.rest()[..len];
        match token.parse::<usize>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => {
                let found = if token.is_empty() { self.describe_next() } else { format!("`{token}`") };
                Err(self.error_at(at, format!("expected a nonnegative integer, found {found}")))
            }
        }
    }

    /// `[a, b, …]`, possibly empty.
    pub(crate) fn list(&mut self) -> Result<Vec<f64>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            if out.len() >= MAX_LIST {
                return Err(self.error_here("list too long".into()));
            }
            out.push(self.number()?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    /// `[[..], [..], …]` with at least one row.
    pub(crate) fn rows(&mut self) -> Result<Vec<Vec<f64>>> {
        self.expect('[')?;
        let mut out = Vec::new();
        loop {
            if out.len() >= MAX_LIST {
                return Err(self.error_here("list too long".into()));
            }
            out.push(self.list()?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }
}
