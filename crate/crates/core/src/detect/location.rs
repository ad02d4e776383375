use super::types::{CodeLocation, EntityKind};
use crate::model::{ClassDecl, Snapshot};

/// Whether `loc` names an existing entity of its kind in `snap`, declared in
/// `loc.file_path` (packages only need to exist).
pub fn validate_location(loc: &CodeLocation, snap: &Snapshot) -> bool {
    let name = loc.qualified_entity_name.as_str();
    if name.is_empty() {
        return false;
    }
    let owner_in_file = |owner: &str| -> Option<&ClassDecl> {
        snap.class(owner)
            .filter(|(path, _)| *path == loc.file_path)
            .map(|(_, class)| class)
    };
    match loc.entity_kind {
        EntityKind::Package => snap.classes().any(|(_, c)| c.package() == name),
        EntityKind::Class => owner_in_file(name).is_some(),
        EntityKind::Method => {
            let Some(open) = name.find('(') else {
                return false;
            };
            let Some((owner, method)) = name[..open].rsplit_once('.') else {
                return false;
            };
            let signature = format!("{method}{}", &name[open..]);
            owner_in_file(owner).is_some_and(|c| c.method(&signature).is_some())
        }
        EntityKind::Attribute => {
            let Some((owner, attribute)) = name.rsplit_once('.') else {
                return false;
            };
            owner_in_file(owner).is_some_and(|c| c.attribute(attribute).is_some())
        }
    }
}
