//! Directive handling, comment stripping and macro expansion.

use super::{AsmError, SourceMetadata};

/// One body line surviving preprocessing, with its original line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyLine {
    pub line: u32,
    pub text: String,
}

fn strip_comment(line: &str) -> &str {
    match line.find("//") {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Handle `#` directives, strip `//` comments, drop blank lines and expand
/// `$key` macros. Directives must precede all body commands.
pub fn preprocess(source: &str) -> Result<(SourceMetadata, Vec<BodyLine>), AsmError> {
    let mut version: Option<(u8, u8)> = None;
    let mut app_id: Option<i32> = None;
    let mut defines: Vec<(String, String)> = Vec::new();
    let mut body: Vec<BodyLine> = Vec::new();

    for (idx, raw) in source.lines().enumerate() {
        let line = idx as u32 + 1;
        let text = strip_comment(raw).trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('#') {
            let rest = rest.trim();
            let (keyword, args) = match rest.split_once(char::is_whitespace) {
                Some((k, a)) => (k, a.trim()),
                None => (rest, ""),
            };
            if !body.is_empty() {
                return Err(AsmError::DirectiveOrder {
                    directive: keyword.to_string(),
                    line,
                });
            }
            match keyword {
                "NETQASM" => {
                    if version.is_some() {
                        return Err(AsmError::DuplicateDirective {
                            directive: keyword.to_string(),
                            line,
                        });
                    }
                    let (maj, min) = args.split_once('.').ok_or_else(|| AsmError::BadDirective {
                        reason: format!("expected `major.minor`, got `{args}`"),
                        line,
                    })?;
                    let parse = |s: &str| {
                        s.parse::<u8>().map_err(|_| AsmError::BadDirective {
                            reason: format!("bad version number `{s}`"),
                            line,
                        })
                    };
                    version = Some((parse(maj)?, parse(min)?));
                }
                "APPID" => {
                    if app_id.is_some() {
                        return Err(AsmError::DuplicateDirective {
                            directive: keyword.to_string(),
                            line,
                        });
                    }
                    app_id = Some(args.parse::<i32>().map_err(|_| AsmError::BadDirective {
                        reason: format!("bad app id `{args}`"),
                        line,
                    })?);
                }
                "DEFINE" => {
                    let (key, value) = args.split_once(char::is_whitespace).ok_or_else(|| {
                        AsmError::BadDirective {
                            reason: "DEFINE needs a key and a value".to_string(),
                            line,
                        }
                    })?;
                    let value = value.trim();
                    // values containing spaces are brace-enclosed
                    let value = if let Some(stripped) = value.strip_prefix('{') {
                        stripped
                            .strip_suffix('}')
                            .ok_or_else(|| AsmError::BadDirective {
                                reason: "unterminated `{` in DEFINE value".to_string(),
                                line,
                            })?
                            .trim()
                            .to_string()
                    } else {
                        value.to_string()
                    };
                    defines.push((key.to_string(), value));
                }
                other => {
                    return Err(AsmError::UnknownDirective {
                        directive: other.to_string(),
                        line,
                    })
                }
            }
        } else {
            body.push(BodyLine {
                line,
                text: text.to_string(),
            });
        }
    }

    let metadata = SourceMetadata {
        version: version.ok_or(AsmError::MissingDirective("NETQASM"))?,
        app_id: app_id.ok_or(AsmError::MissingDirective("APPID"))?,
        defines,
    };

    for body_line in &mut body {
        body_line.text = expand(&body_line.text, &metadata.defines, body_line.line)?;
    }
    // expansion may produce lines that are blank or carry fresh comments
    let body = body
        .into_iter()
        .map(|b| BodyLine {
            text: strip_comment(&b.text).trim().to_string(),
            line: b.line,
        })
        .filter(|b| !b.text.is_empty())
        .collect();

    Ok((metadata, body))
}

fn expand(text: &str, defines: &[(String, String)], line: u32) -> Result<String, AsmError> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((_, c)) = chars.next() {
        if c != '$' {
            out.push(c);
            continue;
        }
        let mut key = String::new();
        while let Some(&(_, k)) = chars.peek() {
            if k.is_ascii_alphanumeric() || k == '_' {
                key.push(k);
                chars.next();
            } else {
                break;
            }
        }
        let value = defines
            .iter()
            .rev()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| AsmError::UndefinedMacro { key: key.clone(), line })?;
        out.push_str(value);
    }
    Ok(out)
}
