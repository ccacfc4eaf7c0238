#include "textprep_data.hpp"

namespace lexcite::detail {

namespace {

const char* const kStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also",
    "am", "an", "and", "any", "are", "arent", "as", "at",
    "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "cannot", "cant", "could", "couldnt", "did",
    "didnt", "do", "does", "doesnt", "doing", "dont", "down", "during",
    "each", "few", "for", "from", "further", "had", "hadnt", "has",
    "hasnt", "have", "havent", "having", "he", "her", "here", "heres",
    "hers", "herself", "hes", "him", "himself", "his", "how", "hows",
    "i", "if", "in", "into", "is", "isnt", "it", "its",
    "itself", "ive", "just", "lets", "me", "more", "most", "mustnt",
    "my", "myself", "no", "nor", "not", "of", "off", "on",
    "once", "only", "or", "other", "ought", "our", "ours", "ourselves",
    "out", "over", "own", "same", "shant", "she", "shes", "should",
    "shouldnt", "so", "some", "such", "than", "that", "thats", "the",
    "their", "theirs", "them", "themselves", "then", "there", "theres", "these",
    "they", "theyd", "theyll", "theyre", "theyve", "this", "those", "through",
    "to", "too", "under", "until", "up", "very", "was", "wasnt",
    "we", "were", "werent", "weve", "what", "whats", "when", "whens",
    "where", "wheres", "which", "while", "who", "whom", "whos", "why",
    "whys", "will", "with", "wont", "would", "wouldnt", "you", "youd",
    "youll", "your", "youre", "yours", "yourself", "yourselves", "youve",
    nullptr,
};

const char* const kBoilerplate[] = {
    "all rights reserved",
    "copyright",
    "disclaimer",
    nullptr,
};

// form/lemma pairs, flattened.
const char* const kLemmaExceptions[] = {
    "am", "be",
    "is", "be",
    "are", "be",
    "was", "be",
    "were", "be",
    "been", "be",
    "being", "be",
    "has", "have",
    "had", "have",
    "did", "do",
    "does", "do",
    "done", "do",
    "doing", "do",
    "going", "go",
    "gone", "go",
    "went", "go",
    "arose", "arise",
    "arisen", "arise",
    "ate", "eat",
    "eaten", "eat",
    "beaten", "beat",
    "became", "become",
    "began", "begin",
    "begun", "begin",
    "bent", "bend",
    "bitten", "bite",
    "blew", "blow",
    "blown", "blow",
    "bore", "bear",
    "born", "bear",
    "borne", "bear",
    "bought", "buy",
    "bound", "bind",
    "bred", "breed",
    "broke", "break",
    "broken", "break",
    "brought", "bring",
    "built", "build",
    "came", "come",
    "caught", "catch",
    "chose", "choose",
    "chosen", "choose",
    "clung", "cling",
    "crept", "creep",
    "dealt", "deal",
    "drank", "drink",
    "drawn", "draw",
    "dreamt", "dream",
    "drew", "draw",
    "driven", "drive",
    "drove", "drive",
    "drunk", "drink",
    "dug", "dig",
    "fed", "feed",
    "fell", "fall",
    "fallen", "fall",
    "felt", "feel",
    "fled", "flee",
    "flew", "fly",
    "flown", "fly",
    "flung", "fling",
    "forbade", "forbid",
    "forbidden", "forbid",
    "foresaw", "foresee",
    "foreseen", "foresee",
    "forgot", "forget",
    "forgotten", "forget",
    "fought", "fight",
    "found", "find",
    "froze", "freeze",
    "frozen", "freeze",
    "gave", "give",
    "given", "give",
    "got", "get",
    "gotten", "get",
    "grew", "grow",
    "grown", "grow",
    "heard", "hear",
    "held", "hold",
    "hid", "hide",
    "hidden", "hide",
    "hung", "hang",
    "kept", "keep",
    "knelt", "kneel",
    "knew", "know",
    "known", "know",
    "lain", "lie",
    "leapt", "leap",
    "learnt", "learn",
    "led", "lead",
    "left", "leave",
    "lent", "lend",
    "lost", "lose",
    "made", "make",
    "meant", "mean",
    "met", "meet",
    "misled", "mislead",
    "overcame", "overcome",
    "paid", "pay",
    "proven", "prove",
    "ran", "run",
    "rang", "ring",
    "ridden", "ride",
    "risen", "rise",
    "rode", "ride",
    "rose", "rise",
    "rung", "ring",
    "said", "say",
    "sang", "sing",
    "sank", "sink",
    "sat", "sit",
    "saw", "see",
    "seen", "see",
    "sent", "send",
    "shot", "shoot",
    "shown", "show",
    "slept", "sleep",
    "slid", "slide",
    "sold", "sell",
    "sought", "seek",
    "spat", "spit",
    "sped", "speed",
    "spent", "spend",
    "spoke", "speak",
    "spoken", "speak",
    "sprang", "spring",
    "spread", "spread",
    "sprung", "spring",
    "spun", "spin",
    "sung", "sing",
    "stole", "steal",
    "stolen", "steal",
    "stood", "stand",
    "stricken", "strike",
    "struck", "strike",
    "strung", "string",
    "stuck", "stick",
    "stung", "sting",
    "sunk", "sink",
    "swam", "swim",
    "swept", "sweep",
    "swore", "swear",
    "sworn", "swear",
    "swum", "swim",
    "swung", "swing",
    "taken", "take",
    "taught", "teach",
    "thought", "think",
    "threw", "throw",
    "thrown", "throw",
    "told", "tell",
    "took", "take",
    "tore", "tear",
    "torn", "tear",
    "undertaken", "undertake",
    "undertook", "undertake",
    "understood", "understand",
    "upheld", "uphold",
    "wept", "weep",
    "withdrawn", "withdraw",
    "withdrew", "withdraw",
    "woke", "wake",
    "won", "win",
    "wore", "wear",
    "worn", "wear",
    "wrote", "write",
    "written", "write",
    "dying", "die",
    "lying", "lie",
    "tying", "tie",
    "acquired", "acquire",
    "acquiring", "acquire",
    "agreed", "agree",
    "arranged", "arrange",
    "arranging", "arrange",
    "cancelled", "cancel",
    "cancelling", "cancel",
    "challenged", "challenge",
    "challenging", "challenge",
    "changed", "change",
    "changing", "change",
    "combined", "combine",
    "compared", "compare",
    "comparing", "compare",
    "compelled", "compel",
    "concluded", "conclude",
    "concluding", "conclude",
    "constituted", "constitute",
    "controlled", "control",
    "controlling", "control",
    "created", "create",
    "creating", "create",
    "decided", "decide",
    "deciding", "decide",
    "declared", "declare",
    "declaring", "declare",
    "declined", "decline",
    "decreed", "decree",
    "defined", "define",
    "defining", "define",
    "described", "describe",
    "describing", "describe",
    "desired", "desire",
    "determined", "determine",
    "determining", "determine",
    "divided", "divide",
    "dividing", "divide",
    "doubling", "double",
    "enabled", "enable",
    "enabling", "enable",
    "entitled", "entitle",
    "examined", "examine",
    "exchanged", "exchange",
    "excluded", "exclude",
    "excluding", "exclude",
    "executed", "execute",
    "executing", "execute",
    "freed", "free",
    "guaranteed", "guarantee",
    "handled", "handle",
    "handling", "handle",
    "hundred", "hundred",
    "included", "include",
    "including", "include",
    "indicated", "indicate",
    "infringed", "infringe",
    "infringing", "infringe",
    "instituted", "institute",
    "located", "locate",
    "operated", "operate",
    "prepared", "prepare",
    "preparing", "prepare",
    "prescribed", "prescribe",
    "provided", "provide",
    "providing", "provide",
    "ranged", "range",
    "ranging", "range",
    "regulated", "regulate",
    "related", "relate",
    "relating", "relate",
    "required", "require",
    "requiring", "require",
    "sampling", "sample",
    "scheduled", "schedule",
    "scheduling", "schedule",
    "settled", "settle",
    "settling", "settle",
    "terminated", "terminate",
    "titled", "title",
    "united", "unite",
    "violated", "violate",
    "violating", "violate",
    "analyses", "analysis",
    "appendices", "appendix",
    "children", "child",
    "criteria", "criterion",
    "crises", "crisis",
    "feet", "foot",
    "geese", "goose",
    "halves", "half",
    "hypotheses", "hypothesis",
    "indices", "index",
    "knives", "knife",
    "lives", "life",
    "matrices", "matrix",
    "men", "man",
    "mice", "mouse",
    "monies", "money",
    "parentheses", "parenthesis",
    "phenomena", "phenomenon",
    "selves", "self",
    "teeth", "tooth",
    "theses", "thesis",
    "wives", "wife",
    "women", "woman",
    "always", "always",
    "anything", "anything",
    "bias", "bias",
    "biased", "bias",
    "everything", "everything",
    "buses", "bus",
    "ceiling", "ceiling",
    "during", "during",
    "evening", "evening",
    "focused", "focus",
    "focusing", "focus",
    "gases", "gas",
    "morning", "morning",
    "movies", "movie",
    "news", "news",
    "nothing", "nothing",
    "notwithstanding", "notwithstanding",
    "outstanding", "outstanding",
    "pending", "pending",
    "perhaps", "perhaps",
    "series", "series",
    "something", "something",
    "species", "species",
    "statuses", "status",
    "whereas", "whereas",
    "widespread", "widespread",
    nullptr,
};

}  // namespace

const char* const* builtin_stopwords() { return kStopwords; }
const char* const* builtin_boilerplate() { return kBoilerplate; }
const char* const* builtin_lemma_exceptions() { return kLemmaExceptions; }

}  // namespace lexcite::detail
