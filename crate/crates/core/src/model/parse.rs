//! Lenient recursive-descent parser over the token stream.
//!
//! Recognized: an optional package clause, imports, and top-level
//! `class` declarations with their attributes and methods. Interfaces,
//! enums, records, annotation types, nested types, constructors and
//! initializer blocks are consumed by brace matching and left out of the
//! model. Any structural surprise aborts the file with a single warning
//! and an empty class list.

use std::collections::BTreeSet;

use super::tokenize::{is_word, lex, Token};
use super::{
    qualify, AccessModifier, AttributeDecl, ClassDecl, MethodDecl, ParseWarning, SourceFile,
    TokenBag,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedFile {
    pub file: SourceFile,
    pub warnings: Vec<ParseWarning>,
}

pub fn parse_source_file(path: &str, source: &str) -> ParsedFile {
    let warn = |message: String| ParseWarning {
        path: path.to_string(),
        message,
    };
    let tokens = match lex(source) {
        Ok(tokens) => tokens,
        Err(err) => {
            return ParsedFile {
                file: SourceFile {
                    path: path.to_string(),
                    package_name: String::new(),
                    classes: Vec::new(),
                },
                warnings: vec![warn(err.to_string())],
            }
        }
    };

    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        package: String::new(),
        member_warnings: Vec::new(),
    };
    let result = parser.compilation_unit();
    let package_name = parser.package.clone();
    let mut warnings: Vec<ParseWarning> = parser.member_warnings.into_iter().map(warn).collect();
    let classes = match result {
        Ok(classes) => classes,
        Err(err) => {
            warnings.clear();
            warnings.push(warn(err));
            Vec::new()
        }
    };
    ParsedFile {
        file: SourceFile {
            path: path.to_string(),
            package_name,
            classes,
        },
        warnings,
    }
}

type PResult<T> = Result<T, String>;

const TYPE_KEYWORDS: [&str; 4] = ["class", "interface", "enum", "record"];
const MODIFIERS: [&str; 14] = [
    "public",
    "protected",
    "private",
    "abstract",
    "static",
    "final",
    "strictfp",
    "sealed",
    "default",
    "synchronized",
    "native",
    "transient",
    "volatile",
    "non-sealed",
];

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    package: String,
    member_warnings: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.peek_at(0)
    }

    fn peek_at(&self, offset: usize) -> Option<&'a str> {
        self.tokens.get(self.pos + offset).map(|t| t.text.as_str())
    }

    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or(self.tokens.last())
            .map(|t| t.line)
            .unwrap_or(1)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.peek() == Some(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{text}'")))
        }
    }

    fn unexpected(&self, wanted: &str) -> String {
        match self.peek() {
            Some(found) => format!("line {}: expected {wanted}, found '{found}'", self.line()),
            None => format!("expected {wanted}, found end of file"),
        }
    }

    fn ident(&mut self) -> PResult<&'a str> {
        match self.tokens.get(self.pos) {
            Some(t) if t.is_word() && !t.text.starts_with(|c: char| c.is_ascii_digit()) => {
                self.pos += 1;
                Ok(t.text.as_str())
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?.to_string();
        while self.peek() == Some(".") && self.peek_at(1).is_some_and(is_word) {
            self.pos += 1;
            name.push('.');
            name.push_str(self.ident()?);
        }
        Ok(name)
    }

    /// Consumes a bracketed group starting at the current opening token and
    /// returns the tokens strictly inside it.
    fn balanced(&mut self, open: &str, close: &str) -> PResult<&'a [Token]> {
        let start_line = self.line();
        self.expect(open)?;
        let start = self.pos;
        let mut depth = 1usize;
        while let Some(text) = self.peek() {
            self.pos += 1;
            if text == open {
                depth += 1;
            } else if text == close {
                depth -= 1;
                if depth == 0 {
                    return Ok(&self.tokens[start..self.pos - 1]);
                }
            }
        }
        Err(format!("line {start_line}: unbalanced '{open}'"))
    }

    fn skip_annotations(&mut self) -> PResult<()> {
        while self.peek() == Some("@") && self.peek_at(1) != Some("interface") {
            self.pos += 1;
            self.qualified_name()?;
            if self.peek() == Some("(") {
                self.balanced("(", ")")?;
            }
        }
        Ok(())
    }

    fn modifiers(&mut self) -> PResult<Vec<&'a str>> {
        let mut found = Vec::new();
        loop {
            self.skip_annotations()?;
            if self.peek() == Some("non") && self.peek_at(1) == Some("-") && self.peek_at(2) == Some("sealed") {
                self.pos += 3;
                found.push("non-sealed");
                continue;
            }
            match self.peek() {
                Some(m) if MODIFIERS.contains(&m) => {
                    // `static {` opens an initializer block, not a member.
                    if m == "static" && self.peek_at(1) == Some("{") {
                        self.pos += 1;
                        return Ok(found);
                    }
                    self.pos += 1;
                    found.push(m);
                }
                _ => return Ok(found),
            }
        }
    }

    fn at_type_declaration(&self) -> bool {
        match self.peek() {
            Some("@") => self.peek_at(1) == Some("interface"),
            Some(k) => TYPE_KEYWORDS.contains(&k),
            None => false,
        }
    }

    /// Skips a non-modeled type declaration (header and body).
    fn skip_type_declaration(&mut self) -> PResult<()> {
        while self.peek().is_some_and(|t| t != "{") {
            if self.peek() == Some(";") {
                return Err(self.unexpected("'{'"));
            }
            self.pos += 1;
        }
        self.balanced("{", "}")?;
        Ok(())
    }

    fn compilation_unit(&mut self) -> PResult<Vec<ClassDecl>> {
        self.skip_annotations()?;
        if self.eat("package") {
            self.package = self.qualified_name()?;
            self.expect(";")?;
        }
        loop {
            self.skip_annotations()?;
            if self.eat("import") {
                while self.peek().is_some_and(|t| t != ";") {
                    self.pos += 1;
                }
                self.expect(";")?;
            } else {
                break;
            }
        }

        let mut classes = Vec::new();
        while self.peek().is_some() {
            if self.eat(";") {
                continue;
            }
            let modifiers = self.modifiers()?;
            if self.eat("class") {
                let access = if modifiers.contains(&"public") {
                    AccessModifier::Public
                } else {
                    AccessModifier::PackagePrivate
                };
                classes.push(self.class_declaration(access)?);
            } else if self.at_type_declaration() {
                self.skip_type_declaration()?;
            } else {
                return Err(self.unexpected("type declaration"));
            }
        }
        Ok(classes)
    }

    fn class_declaration(&mut self, access_modifier: AccessModifier) -> PResult<ClassDecl> {
        let name = self.ident()?.to_string();
        if self.peek() == Some("<") {
            self.balanced("<", ">")?;
        }
        let superclass_name = if self.eat("extends") {
            Some(self.type_name()?)
        } else {
            None
        };
        while self.peek().is_some_and(|t| t != "{") {
            self.pos += 1;
        }
        self.expect("{")?;

        let qualified_name = qualify(&self.package, &name);
        let mut class = ClassDecl {
            name,
            qualified_name,
            access_modifier,
            superclass_name,
            attributes: Vec::new(),
            methods: Vec::new(),
        };
        let mut signatures = BTreeSet::new();
        let mut attribute_names = BTreeSet::new();

        loop {
            match self.peek() {
                None => return Err(format!("class {}: missing closing '}}'", class.name)),
                Some("}") => {
                    self.pos += 1;
                    break;
                }
                Some(";") => self.pos += 1,
                Some("{") => {
                    self.balanced("{", "}")?;
                }
                Some(_) => {
                    let modifiers = self.modifiers()?;
                    if self.peek() == Some("{") {
                        self.balanced("{", "}")?;
                    } else if self.at_type_declaration() {
                        self.skip_type_declaration()?;
                    } else {
                        let access = member_access(&modifiers);
                        match self.member(&class.name, access)? {
                            Member::Method(method) => {
                                if signatures.insert(method.signature()) {
                                    class.methods.push(method);
                                } else {
                                    self.member_warnings.push(format!(
                                        "duplicate method {}.{} ignored",
                                        class.name,
                                        method.signature()
                                    ));
                                }
                            }
                            Member::Attributes(attributes) => {
                                for attribute in attributes {
                                    if attribute_names.insert(attribute.name.clone()) {
                                        class.attributes.push(attribute);
                                    } else {
                                        self.member_warnings.push(format!(
                                            "duplicate attribute {}.{} ignored",
                                            class.name, attribute.name
                                        ));
                                    }
                                }
                            }
                            Member::Skipped => {}
                        }
                    }
                }
            }
        }
        Ok(class)
    }

    fn member(&mut self, class_name: &str, access: AccessModifier) -> PResult<Member> {
        if self.peek() == Some("<") {
            self.balanced("<", ">")?;
        }
        let type_name = self.type_name()?;
        if self.peek() == Some("(") && type_name == class_name {
            // Constructor.
            self.balanced("(", ")")?;
            self.method_tail()?;
            return Ok(Member::Skipped);
        }
        let name = self.ident()?.to_string();
        if self.peek() == Some("(") {
            let parameter_types = self.parameters()?;
            let body = self.method_tail()?;
            return Ok(Member::Method(MethodDecl {
                name,
                parameter_types,
                return_type: type_name,
                access_modifier: access,
                body_tokens: body.iter().map(|t| t.text.clone()).collect(),
            }));
        }

        let mut attributes = Vec::new();
        let mut name = name;
        loop {
            let mut declared_type = type_name.clone();
            while self.peek() == Some("[") && self.peek_at(1) == Some("]") {
                self.pos += 2;
                declared_type.push_str("[]");
            }
            let mut initializer = TokenBag::default();
            if self.eat("=") {
                for token in self.initializer()? {
                    initializer.insert(token.text.clone());
                }
            }
            attributes.push(AttributeDecl {
                name,
                type_name: declared_type,
                access_modifier: access,
                initializer_tokens: initializer,
            });
            if self.eat(";") {
                break;
            }
            self.expect(",")?;
            name = self.ident()?.to_string();
        }
        Ok(Member::Attributes(attributes))
    }

    /// Initializer tokens up to the next declarator separator or `;`.
    fn initializer(&mut self) -> PResult<&'a [Token]> {
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            match self.peek() {
                None => return Err("unterminated field initializer".to_string()),
                Some("(" | "[" | "{") => depth += 1,
                Some(")" | "]" | "}") => {
                    if depth == 0 {
                        return Err(self.unexpected("';'"));
                    }
                    depth -= 1;
                }
                Some(";") if depth == 0 => break,
                Some(",") if depth == 0 && self.next_is_declarator() => break,
                Some(_) => {}
            }
            self.pos += 1;
        }
        Ok(&self.tokens[start..self.pos])
    }

    /// At a `,`: is it followed by `name =`, `name ,`, `name ;` or `name [`?
    fn next_is_declarator(&self) -> bool {
        let name_ok = self
            .peek_at(1)
            .is_some_and(|t| is_word(t) && !t.starts_with(|c: char| c.is_ascii_digit()));
        name_ok && matches!(self.peek_at(2), Some("=" | "," | ";" | "["))
    }

    fn parameters(&mut self) -> PResult<Vec<String>> {
        let inner = self.balanced("(", ")")?;
        let mut sub = Parser {
            tokens: inner,
            pos: 0,
            package: String::new(),
            member_warnings: Vec::new(),
        };
        let mut types = Vec::new();
        while sub.peek().is_some() {
            sub.skip_annotations()?;
            while sub.eat("final") {
                sub.skip_annotations()?;
            }
            let mut param_type = sub.type_name()?;
            sub.ident()?;
            while sub.peek() == Some("[") && sub.peek_at(1) == Some("]") {
                sub.pos += 2;
                param_type.push_str("[]");
            }
            types.push(param_type);
            if sub.peek().is_some() {
                sub.expect(",")?;
            }
        }
        Ok(types)
    }

    /// After a parameter list: array dims, throws clause, then a body or `;`.
    fn method_tail(&mut self) -> PResult<&'a [Token]> {
        while self.peek().is_some_and(|t| t != "{" && t != ";") {
            self.pos += 1;
        }
        if self.eat(";") {
            return Ok(&[]);
        }
        self.balanced("{", "}")
    }

    /// A type as written, generic arguments and array dims flattened into
    /// one string, e.g. `Map<String,List<Integer>>[]`.
    fn type_name(&mut self) -> PResult<String> {
        self.skip_annotations()?;
        let start = self.pos;
        self.ident()?;
        loop {
            match self.peek() {
                Some("<") => {
                    self.balanced("<", ">")?;
                }
                Some(".") if self.peek_at(1).is_some_and(is_word) => {
                    self.pos += 1;
                    self.ident()?;
                }
                Some(".") if self.peek_at(1) == Some(".") && self.peek_at(2) == Some(".") => {
                    self.pos += 3;
                    break;
                }
                Some("[") if self.peek_at(1) == Some("]") => self.pos += 2,
                _ => break,
            }
        }
        Ok(join_type(&self.tokens[start..self.pos]))
    }
}

enum Member {
    Method(MethodDecl),
    Attributes(Vec<AttributeDecl>),
    Skipped,
}

fn member_access(modifiers: &[&str]) -> AccessModifier {
    if modifiers.contains(&"public") {
        AccessModifier::Public
    } else if modifiers.contains(&"protected") {
        AccessModifier::Protected
    } else if modifiers.contains(&"private") {
        AccessModifier::Private
    } else {
        AccessModifier::PackagePrivate
    }
}

fn join_type(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for token in tokens {
        let text = token.text.as_str();
        if let Some(p) = prev {
            if (is_word(p) || p == "?") && is_word(text) {
                out.push(' ');
            }
        }
        out.push_str(text);
        prev = Some(text);
    }
    out
}
