"""Derivación del ADRL a partir del TRL de la NASA"""
from typing import Dict, NamedTuple

from app.taxonomy.model import AdrlLevel


class AdrlDescription(NamedTuple):
    trl_text: str
    adrl_text: str


ADRL_TABLE: Dict[AdrlLevel, AdrlDescription] = {
    AdrlLevel.ADRL_1: AdrlDescription(
        "Basic principles observed and reported",
        "Basic Principles observed and reported (e.g. scientific result on new neural network "
        "architecture in fundamental research)",
    ),
    AdrlLevel.ADRL_2: AdrlDescription(
        "Technology concept and/or application formulated",
        "Technology concept and/or application formulated",
    ),
    AdrlLevel.ADRL_3: AdrlDescription(
        "Analytical and experimental critical function and/or characteristic proof-of-concept",
        "Proof-of-concept by SiL testing (software-in-the-loop)",
    ),
    AdrlLevel.ADRL_4: AdrlDescription(
        "Component and/or breadboard validation in lab environment",
        "Verification by HiL testing (hardware-in-the-loop)",
    ),
    AdrlLevel.ADRL_5: AdrlDescription(
        "Component and,or breadboard validation in relevant environment",
        "Verification by ViL testing (vehicle-in-the-loop)",
    ),
    AdrlLevel.ADRL_6: AdrlDescription(
        "System/subsystem model or prototype demonstration in a relevant environment (ground or space)",
        "Demonstration in real vehicle with safety driver",
    ),
    AdrlLevel.ADRL_7: AdrlDescription(
        "System prototype demonstration in space environment",
        "Validation in real vehicle in ODD with safety driver",
    ),
    AdrlLevel.ADRL_8: AdrlDescription(
        "Actual system completed and “flight qualified” through test and demonstration (ground or space)",
        "Approval, certification, homologation for series production or customer operation",
    ),
    AdrlLevel.ADRL_9: AdrlDescription(
        "Actual system “flight proven” through successful mission operations",
        "System in commercial use without safety driver",
    ),
}


def adrl_description(level: AdrlLevel) -> AdrlDescription:
    return ADRL_TABLE[AdrlLevel.parse(level)]


def simulation_sufficient(level: AdrlLevel) -> bool:
    """ADRL 3 y 4 se alcanzan con simulaciones in-the-loop"""
    return AdrlLevel.parse(level) in (AdrlLevel.ADRL_3, AdrlLevel.ADRL_4)


def requires_vehicle(level: AdrlLevel) -> bool:
    """A partir de ADRL 5 se necesita un vehículo completo"""
    return AdrlLevel.parse(level) >= AdrlLevel.ADRL_5


def requires_public_road(level: AdrlLevel) -> bool:
    """A partir de ADRL 6 se necesitan vehículos en la vía"""
    return AdrlLevel.parse(level) >= AdrlLevel.ADRL_6
