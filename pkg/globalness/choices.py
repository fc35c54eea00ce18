from django.db import models


class Party(models.TextChoices):
    ALICE = "A", "Alice"
    BOB = "B", "Bob"


class GlobalnessKind(models.TextChoices):
    LOCAL = "Local", "Local"
    CONTROLLED_UNITARY = "ControlledUnitaryClass", "Locally equivalent to a controlled-unitary"
    GENERAL_GLOBAL = "GeneralGlobal", "General global"
    SWAP = "SwapClass", "Locally equivalent to SWAP"


class Task(models.TextChoices):
    RELOCALIZE_TWO_PIECE = "Relocalize2Piece", "LOCC one-piece relocalization (two pieces)"
    RELOCALIZE_ONE_PIECE = "Relocalize1Piece", "LOCC one-piece relocalization (one piece)"
    RELOCATE = "Relocate", "LOCC one-piece relocation"
    EA_IMPLEMENT = "EAImplement", "Entanglement-assisted implementation"
    TELEPORT = "Teleport", "Teleportation"


class RelocalizationMode(models.TextChoices):
    TWO_PIECE = "two_piece", "Both inputs unknown"
    ONE_PIECE = "one_piece", "Alice's input fixed"


class DelocalizationOrder(models.TextChoices):
    LESS = "less", "Strictly weaker delocalization power"
    EQUAL = "equal", "Same side of the relocalizability criterion"
    GREATER = "greater", "Strictly stronger delocalization power"
    INCOMPARABLE = "incomparable", "Outside the two-qubit criterion"
