//! Relations and operations on `E_k = {0, .., k-1}`, centers, chains and text I/O.

mod central;
mod domain;
mod enumerate;
mod io;
mod operation;
mod relation;

pub use central::CentralRelation;
pub use domain::{next_tuple, Bits, Domain, Elem, ElemSet, MAX_CELLS, MAX_K};
pub use enumerate::{
    central_relations, iso_canonical_key, permutations, reflexive_symmetric_relations,
};
pub use io::{read_relation, read_relation_with_warnings, write_relation, ParsedRelation};
pub use operation::{Operation, OperationJson};
pub use relation::{diagonal, rainbow_subsets, star, Inclusion, Relation, RelationJson};
