//! Loads the toy knowledge base and runs the lookups the scorers rely on.

use std::path::Path;

use amr_relink::kb::{Direction, KbStore, TypeRef};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy");
    let kb = KbStore::load(
        &dir.join("kb.tsv"),
        Some(&dir.join("labels.tsv")),
        Some(&dir.join("hierarchy.tsv")),
    )?;
    println!("{} triples over {} relations", kb.triple_count(), kb.relations().len());
    for r in kb.relations() {
        println!("  {r:<18} {}", kb.triples_of(&r).len());
    }

    let tesla = kb.canonical_iri("http://dbpedia.org/resource/Nikola_Tesla");
    println!("\n{tesla}");
    println!("  types        {:?}", kb.types_of(&tesla));
    println!("  as subject   {:?}", kb.relations_of(&tesla, Direction::Subject, None));
    let place = TypeRef::Class("dbo:Place".into());
    println!(
        "  to a place   {:?}",
        kb.relations_of(&tesla, Direction::Subject, Some(&place))
    );
    println!("  to Smiljan   {:?}", kb.relations_between(&tesla, "dbr:Smiljan"));
    println!("  most specific type of Smiljan: {:?}", kb.most_specific_type("dbr:Smiljan"));
    println!("  in-degree of Smiljan: {}", kb.in_degree("dbr:Smiljan"));

    println!("\nlabel lookups");
    for label in ["Skype", "benicio del toro", "film", "television show"] {
        println!(
            "  {label:<18} entities {:?} classes {:?}",
            kb.entities_with_label(label),
            kb.classes_with_label(label)
        );
    }
    println!("\nsuperclasses of dbo:Actor: {:?}", kb.superclasses("dbo:Actor"));
    println!("dbo:Village under dbo:Place: {}", kb.is_subclass_of("dbo:Village", "dbo:Place"));
    Ok(())
}
