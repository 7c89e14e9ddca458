"""Alpha-induction modular invariants for ADE module categories over Temperley-Lieb."""
