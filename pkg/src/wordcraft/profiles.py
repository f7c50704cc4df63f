"""Language-pair profiles.

A profile bundles the suggestion length rules and the phoneme inventory used
to validate lexicon entries. CJK-style profiles measure suggestion length in
characters, alphabetic profiles in words; each profile also selects the prompt
template directory of the same name.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

# English phoneme inventory, pre-tokenized: diphthongs and affricates are
# single tokens so segment ranges never split them.
EN_IPA_VOWELS = frozenset(
    "i ɪ e ɛ æ ɑ ɒ ɔ o ʊ u ʌ ə ɜ iː ɑː ɔː uː ɜː "
    "aɪ aʊ ɔɪ eɪ oʊ əʊ ɪə eə ʊə".split()
)

EN_IPA_CONSONANTS = frozenset(
    "p b t d k ɡ g f v θ ð s z ʃ ʒ h m n ŋ l r ɹ j w tʃ dʒ".split()
)

EN_IPA_TOKENS = EN_IPA_VOWELS | EN_IPA_CONSONANTS


@dataclass(frozen=True)
class LanguageProfile:
    profile_id: str
    length_unit: str  # "chars" | "words"
    semantic_concept_max: int
    visual_min: int
    visual_max: int
    relation_min: int
    relation_max: int
    chain_max: int
    ipa_tokens: frozenset[str] = EN_IPA_TOKENS
    ipa_vowels: frozenset[str] = EN_IPA_VOWELS

    def measure(self, text: str) -> int:
        text = text.strip()
        if self.length_unit == "words":
            return len(text.split())
        return len(text)


PROFILES: dict[str, LanguageProfile] = {
    # L1 Chinese learning L2 English: suggestion bounds in Chinese characters.
    "zh-en": LanguageProfile(
        profile_id="zh-en",
        length_unit="chars",
        semantic_concept_max=5,
        visual_min=2,
        visual_max=6,
        relation_min=12,
        relation_max=26,
        chain_max=120,
    ),
    # Alphabetic-L1 analog: the same pipeline with word counts.
    "en": LanguageProfile(
        profile_id="en",
        length_unit="words",
        semantic_concept_max=3,
        visual_min=1,
        visual_max=3,
        relation_min=4,
        relation_max=14,
        chain_max=30,
    ),
}


def get_profile(profile_id: str) -> LanguageProfile:
    try:
        return PROFILES[profile_id]
    except KeyError:
        raise ConfigError(f"unknown language profile {profile_id!r}") from None
