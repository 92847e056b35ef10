"""vuldat: link attack-technique text to CVE reports.

Pipeline: ingest the four MITRE feeds into a snapshot, build the explicit
attack->CVE mapping through the technique->CAPEC->CWE->CVE reference chain,
normalize text, embed it, rank CVEs by cosine similarity against an attack
description, and score the retrieved lists against the mapping.
"""

__version__ = "0.1.0"
