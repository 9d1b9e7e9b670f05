from .tables import RULE_184, WOLFRAM_NUMBER
