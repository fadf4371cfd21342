// placeholder
pub fn placeholder() {}
