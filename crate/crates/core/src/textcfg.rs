//! Line-oriented `key = value` grammar used by sensor descriptions and
//! augmentation specs.
//!
//! ```text
//! # comment
//! key = value          # trailing comments are allowed
//! [section-name]       # optional; starts a new named section
//! ```
//!
//! Keys are case-sensitive identifiers; duplicate keys within a section are
//! rejected. Lists are comma-separated (`1024, 2048`), closed ranges are two
//! comma-separated numbers (`-0.5, 0.5`).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct Section {
    path: PathBuf,
    name: String,
    header_line: usize,
    entries: Vec<Entry>,
}

#[derive(Debug, Clone)]
pub struct Document {
    sections: Vec<Section>,
}

pub fn read(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Document::parse(&text, path)
}

impl Document {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut sections = vec![Section {
            path: path.to_path_buf(),
            name: String::new(),
            header_line: 0,
            entries: Vec::new(),
        }];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                msg,
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err("unterminated section header".into()))?
                    .trim();
                if name.is_empty() {
                    return Err(parse_err("empty section name".into()));
                }
                sections.push(Section {
                    path: path.to_path_buf(),
                    name: name.to_string(),
                    header_line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(parse_err(format!("invalid key `{key}`")));
            }
            let section = sections.last_mut().expect("root section exists");
            if section.entries.iter().any(|e| e.key == key) {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line: line_no,
            });
        }
        Ok(Document { sections })
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    /// The unnamed top-level section.
    pub fn root(&self) -> &Section {
        &self.sections[0]
    }
}

impl Section {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn error_at(&self, entry: &Entry, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: entry.line,
            msg: msg.into(),
        }
    }

    pub fn error_at_header(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.header_line,
            msg: msg.into(),
        }
    }

    pub fn get_parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|err| self.error_at(e, format!("`{key}`: {err}"))),
        }
    }

    pub fn require_parse<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get_parse(key)?
            .ok_or_else(|| self.error_at_header(format!("missing required key `{key}`")))
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(e) = self.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|item| {
                item.trim()
                    .parse::<T>()
                    .map_err(|err| self.error_at(e, format!("`{key}`: {err}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn get_range<T: FromStr + Copy>(&self, key: &str) -> Result<Option<(T, T)>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(items) = self.get_list::<T>(key)? else {
            return Ok(None);
        };
        match items.as_slice() {
            [lo, hi] => Ok(Some((*lo, *hi))),
            _ => Err(self.error_at(
                self.get(key).expect("present"),
                format!("`{key}` expects two comma-separated values"),
            )),
        }
    }

    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
            Some(e) => Err(self.error_at(e, format!("unknown key `{}`", e.key))),
            None => Ok(()),
        }
    }
}
