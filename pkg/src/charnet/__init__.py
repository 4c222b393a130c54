"""Extract static and dynamic character networks from narrative texts."""
from charnet.pipeline import (
    ArtifactKey,
    MalformedArtifact,
    MissingResource,
    Pipeline,
    PipelineState,
    PipelineStep,
    StepError,
    StepSignature,
    ValidationError,
    ValidationReport,
    inject_artifact,
    run_pipeline,
    validate_pipeline,
)
from charnet.preprocessing import CustomSubstitutionPreprocessor, SubstitutionRule, Tokenizer, tokenize
from charnet.ner import EntityMention, NamedEntityRecognizer, decode_bio, encode_bio, recognize_entities
from charnet.quotes import Quote, QuoteDetector, SpeakerAttribution, SpeakerDetector
from charnet.unification import (
    Character,
    CorefChain,
    GraphRulesCharacterUnifier,
    NaiveCharacterUnifier,
    parse_human_name,
)
from charnet.graph_extraction import (
    CharacterNetwork,
    CoOccurrencesGraphExtractor,
    ConversationalGraphExtractor,
    DynamicNetwork,
    ExtractionConfig,
)
from charnet.graph_io import export_network, read_gexf, read_injection_file

__version__ = "0.1.0"
