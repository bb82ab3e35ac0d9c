#include "consentscan/language.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "consentscan/text.hpp"

namespace consentscan::textclass {

namespace {

// 40 high-frequency function words per language. Equal list sizes keep the
// per-language fractions comparable.
const std::map<std::string, std::vector<std::string>>& lists()
{
    static const std::map<std::string, std::vector<std::string>> m = {
        {"en", {"the", "and",   "of",   "to",   "in",    "is",   "you",   "that", "it",    "for",
                "on",  "with",  "as",   "are",  "this",  "be",   "at",    "or",   "by",    "we",
                "our", "your",  "from", "have", "not",   "can",  "an",    "but",  "all",   "they",
                "will", "more", "which", "their", "has", "was",  "if",    "about", "these", "how"}},
        {"de", {"der",  "die",   "das",   "und",  "zu",   "den",   "ist",    "nicht", "von",   "sie",
                "mit",  "dem",   "des",   "auf",  "für",  "ein",   "eine",   "auch",  "es",    "an",
                "werden", "aus", "er",    "hat",  "dass", "wir",   "ihr",    "ihre",  "ihnen", "um",
                "wie",  "oder",  "bei",   "nur",  "noch", "sich",  "diese",  "durch", "können", "uns"}},
        {"fr", {"le",   "la",   "les",   "de",    "des",  "et",    "en",   "un",   "une",  "du",
                "est",  "que",  "qui",   "pour",  "dans", "pas",   "sur",  "au",   "avec", "ce",
                "il",   "nous", "vous",  "votre", "vos",  "sont",  "par",  "plus", "ou",   "ne",
                "se",   "aux",  "cette", "ces",   "son",  "leur",  "mais", "sans", "notre", "nos"}},
        {"es", {"el",   "la",    "los",   "las",     "de",    "y",     "en",   "que",    "un",     "una",
                "es",   "por",   "con",   "para",    "del",   "se",    "no",   "al",     "lo",     "como",
                "su",   "sus",   "más",   "pero",    "este",  "esta",  "nuestro", "nuestra", "usted", "sin",
                "sobre", "también", "o",  "le",      "ya",    "son",   "entre", "cuando", "muy",   "todos"}},
        {"it", {"il",   "lo",    "la",    "gli",   "le",     "di",    "e",     "che",   "un",    "una",
                "per",  "non",   "in",    "con",   "del",    "della", "dei",   "delle", "sono",  "si",
                "al",   "alla",  "da",    "come",  "questo", "questa", "nostro", "nostri", "tuo", "tuoi",
                "più",  "ma",    "anche", "o",     "se",     "suo",   "sua",   "nel",   "nella", "ci"}},
        {"nl", {"de",   "het",   "een",  "en",   "van",   "ik",    "te",    "dat",  "die",   "in",
                "is",   "niet",  "op",   "aan",  "met",   "voor",  "zijn",  "er",   "maar",  "om",
                "ook",  "als",   "bij",  "of",   "uit",   "wij",   "we",    "onze", "uw",    "u",
                "je",   "deze",  "dit",  "naar", "worden", "wordt", "door", "kan",  "hun",   "meer"}},
        {"pt", {"o",    "a",     "os",    "as",    "de",    "do",    "da",    "dos",  "das",   "e",
                "em",   "que",   "um",    "uma",   "para",  "com",   "não",   "por",  "no",    "na",
                "mais", "se",    "como",  "seu",   "sua",   "seus",  "nosso", "nossa", "você", "ao",
                "ou",   "mas",   "este",  "esta",  "são",   "pelo",  "pela",  "sobre", "também", "nos"}},
        {"pl", {"i",    "w",     "na",    "z",     "do",    "nie",   "się",   "że",   "to",    "jest",
                "o",    "jak",   "a",     "po",    "przez", "dla",   "od",    "ale",  "jego",  "jej",
                "tak",  "lub",   "czy",   "ten",   "ta",    "te",    "są",    "być",  "może",  "oraz",
                "nasz", "nasze", "twoje", "pan",   "przy",  "za",    "tylko", "już",  "co",    "aby"}},
    };
    return m;
}

} // namespace

const std::vector<std::string>& supported_languages()
{
    static const std::vector<std::string> order = {"en", "de", "fr", "es", "it", "nl", "pt", "pl"};
    return order;
}

const std::vector<std::string>& stopwords(const std::string& language)
{
    auto it = lists().find(language);
    if (it == lists().end()) {
        throw std::invalid_argument("no stopword list for " + language);
    }
    return it->second;
}

std::string detect_language(std::string_view input)
{
    const auto tokens = text::word_tokens(input);
    if (tokens.size() < 3) {
        return "und";
    }
    const std::set<std::string> present(tokens.begin(), tokens.end());
    std::string best = "und";
    double best_fraction = 0.0;
    for (const auto& lang : supported_languages()) {
        const auto& words = stopwords(lang);
        std::size_t hits = 0;
        for (const auto& w : words) {
            hits += present.count(w);
        }
        const double fraction = static_cast<double>(hits) / static_cast<double>(words.size());
        if (fraction > best_fraction) {
            best_fraction = fraction;
            best = lang;
        }
    }
    return best_fraction < 0.02 ? "und" : best;
}

} // namespace consentscan::textclass
