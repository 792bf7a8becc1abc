//! Minimal sectioned key = value reader and writer.

use std::fmt;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            entries: Vec::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Replaces an existing key or appends a new one.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    /// `#` and `;` start comment lines; keys before any header land in an
    /// unnamed section. Every malformed line is reported.
    pub fn parse(text: &str) -> Result<Self, Vec<String>> {
        let mut sections: Vec<Section> = Vec::new();
        let mut errors = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) if !name.trim().is_empty() => {
                        sections.push(Section::new(name.trim()))
                    }
                    _ => errors.push(format!(
                        "line {}: malformed section header `{line}`",
                        no + 1
                    )),
                }
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => {
                    if sections.is_empty() {
                        sections.push(Section::new(""));
                    }
                    let section = sections.last_mut().unwrap();
                    section
                        .entries
                        .push((k.trim().to_string(), v.trim().to_string()));
                }
                _ => errors.push(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    no + 1
                )),
            }
        }
        if errors.is_empty() {
            Ok(Self { sections })
        } else {
            Err(errors)
        }
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn section_mut(&mut self, name: &str) -> &mut Section {
        if let Some(i) = self.sections.iter().position(|s| s.name == name) {
            &mut self.sections[i]
        } else {
            self.sections.push(Section::new(name));
            self.sections.last_mut().unwrap()
        }
    }

    /// Applies `section.key=value`; the key is everything after the last dot
    /// so that dotted section names such as `packet.gauss` work.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), String> {
        let (path, value) = assignment.split_once('=').ok_or_else(|| {
            format!("override `{assignment}` is not of the form section.key=value")
        })?;
        let (section, key) = path
            .trim()
            .rsplit_once('.')
            .filter(|(s, k)| !s.is_empty() && !k.is_empty())
            .ok_or_else(|| format!("override `{assignment}` needs a section.key path"))?;
        self.section_mut(section).set(key, value.trim());
        Ok(())
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            if !s.name.is_empty() {
                writeln!(f, "[{}]", s.name)?;
            }
            for (k, v) in &s.entries {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let text = "# run\n[grid]\nlength = 50\ncount=1024\n\n[packet.a]\nkind = gaussian\n";
        let doc = Document::parse(text).unwrap();
        assert_eq!(doc.section("grid").unwrap().get("count"), Some("1024"));
        assert_eq!(
            doc.section("packet.a").unwrap().get("kind"),
            Some("gaussian")
        );
        assert_eq!(Document::parse(&doc.to_string()).unwrap(), doc);
    }

    #[test]
    fn every_bad_line_is_reported() {
        let errs = Document::parse("[grid\nnot a pair\n[ok]\nx = 1\n= 2\n").unwrap_err();
        assert_eq!(errs.len(), 3);
        assert!(errs[0].starts_with("line 1"));
    }

    #[test]
    fn overrides_use_last_dot() {
        let mut doc = Document::parse("[packet.g]\nsigma0 = 1\n").unwrap();
        doc.apply_override("packet.g.sigma0=2.5").unwrap();
        doc.apply_override("grid.count = 512").unwrap();
        assert_eq!(doc.section("packet.g").unwrap().get("sigma0"), Some("2.5"));
        assert_eq!(doc.section("grid").unwrap().get("count"), Some("512"));
        assert!(doc.apply_override("nodots=1").is_err());
    }
}
