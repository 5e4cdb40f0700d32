pub mod curvature;
pub mod error;
pub mod exterior;
pub mod matrix;
pub mod operator;
pub mod pure;
pub mod scalar;
pub mod thorpe;
pub mod zoo;
pub mod normalform4;
pub mod io;
pub mod oracle;
pub mod verify;
