//! A tiny class model that renders to Java source, plus a random history
//! generator built on it.

use std::collections::BTreeMap;

use cgrminer::repo::{FileOp, HistoryScript, ScriptCommit};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    pub ty: String,
    pub access: &'static str,
    pub init: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub name: String,
    pub params: Vec<String>,
    pub ret: String,
    pub access: &'static str,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Class {
    pub package: String,
    pub name: String,
    pub public: bool,
    pub superclass: Option<String>,
    pub fields: Vec<Field>,
    pub methods: Vec<Method>,
}

pub fn field(access: &'static str, ty: &str, name: &str) -> Field {
    Field {
        name: name.into(),
        ty: ty.into(),
        access,
        init: None,
    }
}

pub fn method(access: &'static str, ret: &str, name: &str, params: &[&str], body: &str) -> Method {
    Method {
        name: name.into(),
        params: params.iter().map(|p| p.to_string()).collect(),
        ret: ret.into(),
        access,
        body: body.into(),
    }
}

impl Class {
    pub fn new(package: &str, name: &str) -> Self {
        Self {
            package: package.into(),
            name: name.into(),
            public: true,
            superclass: None,
            fields: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn extends(mut self, superclass: &str) -> Self {
        self.superclass = Some(superclass.into());
        self
    }

    pub fn package_private(mut self) -> Self {
        self.public = false;
        self
    }

    pub fn with_field(mut self, f: Field) -> Self {
        self.fields.push(f);
        self
    }

    pub fn with_method(mut self, m: Method) -> Self {
        self.methods.push(m);
        self
    }

    pub fn qualified(&self) -> String {
        if self.package.is_empty() {
            self.name.clone()
        } else {
            format!("{}.{}", self.package, self.name)
        }
    }

    pub fn path(&self) -> String {
        format!("src/{}/{}.java", self.package.replace('.', "/"), self.name)
    }

    /// The class declaration alone, without a package clause.
    pub fn declaration(&self) -> String {
        let mut s = String::new();
        if self.public {
            s.push_str("public ");
        }
        s.push_str(&format!("class {}", self.name));
        if let Some(sup) = &self.superclass {
            s.push_str(&format!(" extends {sup}"));
        }
        s.push_str(" {\n");
        for f in &self.fields {
            let access = if f.access.is_empty() { String::new() } else { format!("{} ", f.access) };
            match &f.init {
                Some(init) => s.push_str(&format!("    {access}{} {} = {init};\n", f.ty, f.name)),
                None => s.push_str(&format!("    {access}{} {};\n", f.ty, f.name)),
            }
        }
        for m in &self.methods {
            let access = if m.access.is_empty() { String::new() } else { format!("{} ", m.access) };
            let params: Vec<String> = m
                .params
                .iter()
                .enumerate()
                .map(|(i, t)| format!("{t} p{i}"))
                .collect();
            s.push_str(&format!(
                "\n    {access}{} {}({}) {{\n        {}\n    }}\n",
                m.ret,
                m.name,
                params.join(", "),
                m.body
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn source(&self) -> String {
        format!("package {};\n\n{}", self.package, self.declaration())
    }
}

/// File map of a set of classes, one file per class.
pub fn render(classes: &[Class]) -> BTreeMap<String, String> {
    classes.iter().map(|c| (c.path(), c.source())).collect()
}

/// File operations turning tree `from` into tree `to`.
pub fn diff_ops(from: &BTreeMap<String, String>, to: &BTreeMap<String, String>) -> Vec<FileOp> {
    let mut ops = Vec::new();
    for path in from.keys() {
        if !to.contains_key(path) {
            ops.push(FileOp::Delete { path: path.clone() });
        }
    }
    for (path, content) in to {
        if from.get(path) != Some(content) {
            ops.push(FileOp::Write {
                path: path.clone(),
                content: content.clone(),
            });
        }
    }
    ops
}

/// Builds a linear script from successive states, one commit per state.
pub fn linear_script(ids: &[&str], states: &[BTreeMap<String, String>]) -> HistoryScript {
    let mut commits = Vec::new();
    let mut previous = BTreeMap::new();
    for (id, state) in ids.iter().zip(states) {
        commits.push(ScriptCommit {
            id: id.to_string(),
            parents: Vec::new(),
            ops: diff_ops(&previous, state),
        });
        previous = state.clone();
    }
    HistoryScript { commits }
}

const PACKAGES: [&str; 4] = ["app.core", "app.util", "app.model", "app.io"];
const TYPES: [&str; 4] = ["int", "String", "long", "boolean"];

fn body<R: Rng>(rng: &mut R) -> String {
    let words = ["count", "total", "name", "value", "size", "index", "cache", "limit"];
    let a = words.choose(rng).unwrap();
    let b = words.choose(rng).unwrap();
    match rng.gen_range(0..4) {
        0 => format!("return {a} + {};", rng.gen_range(1..50)),
        1 => format!("{a} = {b} * {}; return {a};", rng.gen_range(2..9)),
        2 => format!("if ({a} > {b}) {{ return {a}; }} return {b};"),
        _ => format!("log(\"{a}\", {b}); return {b};"),
    }
}

fn random_method<R: Rng>(rng: &mut R, name: String) -> Method {
    let n = rng.gen_range(0..3);
    Method {
        name,
        params: (0..n).map(|_| TYPES.choose(rng).unwrap().to_string()).collect(),
        ret: "int".into(),
        access: ["public", "private", ""].choose(rng).unwrap(),
        body: body(rng),
    }
}

struct Namer {
    next: usize,
}

impl Namer {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }
}

fn random_class<R: Rng>(rng: &mut R, namer: &mut Namer) -> Class {
    let mut c = Class::new(PACKAGES.choose(rng).unwrap(), &namer.fresh("C"));
    c.public = rng.gen_bool(0.7);
    for _ in 0..rng.gen_range(0..3) {
        c.fields.push(Field {
            name: namer.fresh("f"),
            ty: TYPES.choose(rng).unwrap().to_string(),
            access: ["private", "protected", ""].choose(rng).unwrap(),
            init: None,
        });
    }
    for _ in 0..rng.gen_range(1..4) {
        let name = namer.fresh("m");
        c.methods.push(random_method(rng, name));
    }
    c
}

/// Applies one random edit, refactoring or not, to `classes`.
fn mutate<R: Rng>(rng: &mut R, classes: &mut Vec<Class>, namer: &mut Namer, max_classes: usize) {
    if classes.is_empty() {
        classes.push(random_class(rng, namer));
        return;
    }
    let i = rng.gen_range(0..classes.len());
    let j = rng.gen_range(0..classes.len());
    match rng.gen_range(0..16) {
        0 => {
            let current = classes[i].package.clone();
            let choices: Vec<&str> = PACKAGES.iter().copied().filter(|p| *p != current).collect();
            classes[i].package = choices.choose(rng).unwrap().to_string();
            if rng.gen_bool(0.2) {
                classes[i].package = format!("app.fresh{}", rng.gen_range(0..3));
            }
        }
        1 => classes[i].name = namer.fresh("R"),
        2 => {
            classes[i].name = namer.fresh("R");
            classes[i].package = PACKAGES.choose(rng).unwrap().to_string();
        }
        3 => classes[i].public = !classes[i].public,
        4 if i != j && !classes[i].methods.is_empty() => {
            let k = rng.gen_range(0..classes[i].methods.len());
            let m = classes[i].methods.remove(k);
            if classes[j].methods.iter().all(|x| x.name != m.name || x.params != m.params) {
                classes[j].methods.push(m);
            }
        }
        5 if !classes[i].methods.is_empty() => {
            let k = rng.gen_range(0..classes[i].methods.len());
            classes[i].methods[k].name = namer.fresh("m");
        }
        6 if !classes[i].methods.is_empty() => {
            let k = rng.gen_range(0..classes[i].methods.len());
            let m = &mut classes[i].methods[k];
            let at = rng.gen_range(0..=m.params.len());
            m.params.insert(at, TYPES.choose(rng).unwrap().to_string());
        }
        7 if !classes[i].methods.is_empty() => {
            let k = rng.gen_range(0..classes[i].methods.len());
            let m = &mut classes[i].methods[k];
            if !m.params.is_empty() {
                let at = rng.gen_range(0..m.params.len());
                m.params.remove(at);
            }
        }
        8 if !classes[i].methods.is_empty() => {
            let k = rng.gen_range(0..classes[i].methods.len());
            let m = &mut classes[i].methods[k];
            m.access = if m.access == "public" { "private" } else { "public" };
        }
        9 if i != j && !classes[i].fields.is_empty() => {
            let k = rng.gen_range(0..classes[i].fields.len());
            let f = classes[i].fields.remove(k);
            classes[j].fields.push(f);
        }
        10 if !classes[i].fields.is_empty() => {
            let k = rng.gen_range(0..classes[i].fields.len());
            classes[i].fields[k].name = namer.fresh("f");
        }
        11 if !classes[i].fields.is_empty() => {
            let k = rng.gen_range(0..classes[i].fields.len());
            let f = &mut classes[i].fields[k];
            f.access = if f.access == "private" { "public" } else { "private" };
        }
        12 if classes.len() < max_classes => classes.push(random_class(rng, namer)),
        13 if classes.len() > 1 => {
            classes.remove(i);
        }
        14 if i != j => {
            let sup = classes[j].name.clone();
            classes[i].superclass = Some(sup);
        }
        _ => {
            if !classes[i].methods.is_empty() {
                let k = rng.gen_range(0..classes[i].methods.len());
                classes[i].methods[k].body = body(rng);
            } else {
                let name = namer.fresh("m");
                classes[i].methods.push(random_method(rng, name));
            }
        }
    }
}

/// A random history: up to `max_commits` commits, up to `max_classes`
/// classes per snapshot, with occasional branches and merges.
pub fn random_script<R: Rng>(rng: &mut R, max_commits: usize, max_classes: usize) -> HistoryScript {
    let n = rng.gen_range(1..=max_commits);
    let mut namer = Namer { next: 0 };
    let mut states: Vec<Vec<Class>> = Vec::new();
    let mut trees: Vec<BTreeMap<String, String>> = Vec::new();
    let mut commits = Vec::new();
    for k in 0..n {
        let parents: Vec<usize> = if k == 0 {
            Vec::new()
        } else if k >= 2 && rng.gen_bool(0.15) {
            let a = rng.gen_range(0..k);
            let b = rng.gen_range(0..k);
            if a == b { vec![a] } else { vec![a, b] }
        } else if rng.gen_bool(0.15) {
            vec![rng.gen_range(0..k)]
        } else {
            vec![k - 1]
        };
        let mut classes = match parents.first() {
            Some(&p) => states[p].clone(),
            None => (0..rng.gen_range(1..=max_classes.min(4)))
                .map(|_| random_class(rng, &mut namer))
                .collect(),
        };
        if k > 0 {
            for _ in 0..rng.gen_range(1..=2) {
                mutate(rng, &mut classes, &mut namer, max_classes);
            }
        }
        dedup_classes(&mut classes);
        let tree = render(&classes);
        let base = parents.first().map(|&p| trees[p].clone()).unwrap_or_default();
        let explicit = if parents == [k.saturating_sub(1)] && k > 0 {
            Vec::new()
        } else {
            parents.iter().map(|p| format!("c{p}")).collect()
        };
        commits.push(ScriptCommit {
            id: format!("c{k}"),
            parents: explicit,
            ops: diff_ops(&base, &tree),
        });
        states.push(classes);
        trees.push(tree);
    }
    HistoryScript { commits }
}

/// Keeps qualified names unique so every class has its own file.
fn dedup_classes(classes: &mut Vec<Class>) {
    let mut seen = std::collections::BTreeSet::new();
    classes.retain(|c| seen.insert(c.qualified()));
}
