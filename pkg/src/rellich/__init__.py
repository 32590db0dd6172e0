"""Critical Rellich inequality laboratory."""
