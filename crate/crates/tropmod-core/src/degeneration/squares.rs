use super::{glue_at_node, self_glue, tropicalize, NodalDegeneration};
use crate::certificate::Certificate;
use crate::cones::{DualElement, Face};
use crate::curves::are_isomorphic;
use crate::error::{Error, Result};
use crate::universal::{attach, clutch, forget_leg, self_clutch};

/// Tropicalize then restrict to `face`, against smoothing the vanishing nodes
/// then tropicalizing.
pub fn check_specialization_square(x: &NodalDegeneration, face: &Face) -> Result<Certificate> {
    let mut cert = Certificate::new(format!("specialization to face {:?}", face.ray_indices));
    let (pulled, _) = tropicalize(x)?.restrict(face)?;
    let smoothed = tropicalize(&x.specialize_to_face(face)?)?;
    cert.check(
        "restriction of the dual curve is the dual curve of the restriction",
        are_isomorphic(&pulled, &smoothed),
        format!("{} edges survive", pulled.graph.num_edges()),
    );
    Ok(cert)
}

pub fn check_all_faces(x: &NodalDegeneration) -> Result<Certificate> {
    let mut cert = Certificate::new("specialization squares");
    for face in x.cone.face_lattice() {
        cert.absorb(check_specialization_square(x, &face)?);
    }
    Ok(cert)
}

pub fn check_clutch_square(
    left: &NodalDegeneration,
    star: u32,
    right: &NodalDegeneration,
    bullet: u32,
    d: &DualElement,
) -> Result<Certificate> {
    let mut cert = Certificate::new("clutching square");
    let glued = tropicalize(&glue_at_node(left, star, right, bullet, d)?)?;
    let clutched = clutch(&tropicalize(left)?, star, &tropicalize(right)?, bullet, d)?;
    cert.check("dual curve of the nodal union is the clutched curve", are_isomorphic(&glued, &clutched), "");
    let (g1, g2) = (left.genus()?, right.genus()?);
    cert.check("genera add", glued.genus() == g1 + g2, format!("{g1} + {g2} -> {}", glued.genus()));
    Ok(cert)
}

pub fn check_self_clutch_square(x: &NodalDegeneration, star: u32, bullet: u32, d: &DualElement) -> Result<Certificate> {
    let mut cert = Certificate::new("self-clutching square");
    let glued = tropicalize(&self_glue(x, star, bullet, d)?)?;
    let clutched = self_clutch(&tropicalize(x)?, star, bullet, d)?;
    cert.check("dual curve of the self-gluing is the self-clutched curve", are_isomorphic(&glued, &clutched), "");
    cert.check("genus goes up by one", glued.genus() == x.genus()? + 1, "");
    Ok(cert)
}

/// Forgets the largest marking on both sides.
pub fn check_forget_square(x: &NodalDegeneration) -> Result<Certificate> {
    let mut cert = Certificate::new("forgetful square");
    let label = *x.markings.keys().next_back().ok_or_else(|| Error::InvalidDegeneration("no markings".into()))?;
    let curve = tropicalize(x)?;
    let f = forget_leg(&curve, label)?;
    let nodal = tropicalize(&x.forget_marking(label)?)?;
    cert.check("forgetting commutes with tropicalization", are_isomorphic(&f.curve, &nodal), format!("case {:?}", f.case));
    cert.check("attaching the recorded datum restores the curve", are_isomorphic(&attach(&f.curve, &f.datum)?, &curve), "");
    Ok(cert)
}
