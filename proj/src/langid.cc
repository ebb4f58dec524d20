#include "cyberevent/langid.h"

#include <cctype>
#include <cmath>
#include <limits>

#include "cyberevent/errors.h"

namespace cyber {
namespace {

// Letters lowercased, every run of non-letters collapsed to one space.
// Non-ASCII bytes are kept so accented letters contribute trigrams.
std::string letters_only(std::string_view text, bool* has_alpha) {
  std::string out = " ";
  *has_alpha = false;
  for (unsigned char c : text) {
    if (std::isalpha(c) || c >= 0x80) {
      out.push_back(static_cast<char>(std::tolower(c)));
      if (std::isalpha(c)) *has_alpha = true;
    } else if (out.back() != ' ') {
      out.push_back(' ');
    }
  }
  if (out.back() != ' ') out.push_back(' ');
  return out;
}

std::vector<std::string> trigrams(std::string_view text, bool* has_alpha) {
  std::string s = letters_only(text, has_alpha);
  std::vector<std::string> grams;
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) {
    grams.emplace_back(s.substr(i, 3));
  }
  return grams;
}

const std::vector<std::string>& english_corpus() {
  static const std::vector<std::string> kText = {
      "the quick brown fox jumps over the lazy dog",
      "security researchers discovered a new vulnerability in the software",
      "hackers have stolen millions of user passwords from the company",
      "please update your browser to the latest version as soon as possible",
      "we are going to the beach this weekend with our friends",
      "the government announced new rules for data protection",
      "this is one of the worst attacks we have seen in years",
      "an attacker could exploit this flaw to take control of the system",
      "i think it will rain tomorrow so bring an umbrella",
      "the bank warned customers about fake emails asking for their details",
      "thanks for sharing this great article about network security",
      "what do you think about the new phone that was released yesterday",
      "our team is working hard to fix the problem and restore the service",
      "the website was down for several hours after the attack",
      "they said that nobody would be able to access the files without a key",
      "there were thousands of people waiting outside the stadium",
      "my computer keeps crashing whenever i open that program",
      "the report shows how criminals use social media to spread malware",
      "everyone should use strong passwords and enable two factor authentication",
      "she was reading a book while he was cooking dinner in the kitchen",
      "breaking news the hospital systems were locked by ransomware",
      "you can find more information on our website",
      "the police arrested two men who were selling stolen credit cards",
      "it is important to keep your operating system up to date",
      "which of these services do you use every day",
      "the children played in the garden until it got dark",
      "a critical bug allows remote code execution on affected servers",
      "the database of the retailer was exposed on the internet",
  };
  return kText;
}

const std::vector<std::string>& spanish_corpus() {
  static const std::vector<std::string> kText = {
      "el rápido zorro marrón salta sobre el perro perezoso",
      "los investigadores de seguridad descubrieron una nueva vulnerabilidad",
      "los piratas informáticos robaron millones de contraseñas de usuarios",
      "por favor actualice su navegador a la última versión lo antes posible",
      "vamos a la playa este fin de semana con nuestros amigos",
      "el gobierno anunció nuevas reglas para la protección de datos",
      "este es uno de los peores ataques que hemos visto en años",
      "creo que mañana va a llover así que lleva un paraguas",
      "el banco advirtió a los clientes sobre correos falsos",
      "gracias por compartir este gran artículo sobre seguridad",
      "qué piensas del nuevo teléfono que salió ayer",
      "nuestro equipo trabaja para resolver el problema y restaurar el servicio",
      "el sitio web estuvo caído durante varias horas después del ataque",
      "había miles de personas esperando fuera del estadio",
      "mi ordenador se bloquea cada vez que abro ese programa",
      "todos deberían usar contraseñas seguras y activar la autenticación",
      "ella estaba leyendo un libro mientras él cocinaba la cena",
      "puedes encontrar más información en nuestra página",
      "la policía arrestó a dos hombres que vendían tarjetas robadas",
      "es importante mantener el sistema operativo actualizado",
      "los niños jugaron en el jardín hasta que oscureció",
      "la base de datos de la empresa quedó expuesta en internet",
  };
  return kText;
}

const std::vector<std::string>& french_corpus() {
  static const std::vector<std::string> kText = {
      "le renard brun rapide saute par dessus le chien paresseux",
      "des chercheurs en sécurité ont découvert une nouvelle vulnérabilité",
      "les pirates ont volé des millions de mots de passe des utilisateurs",
      "veuillez mettre à jour votre navigateur dès que possible",
      "nous allons à la plage ce week end avec nos amis",
      "le gouvernement a annoncé de nouvelles règles pour la protection des données",
      "c'est l'une des pires attaques que nous ayons vues depuis des années",
      "je pense qu'il va pleuvoir demain alors prends un parapluie",
      "la banque a averti ses clients au sujet de faux courriels",
      "merci de partager cet excellent article sur la sécurité",
      "que penses tu du nouveau téléphone sorti hier",
      "notre équipe travaille dur pour résoudre le problème",
      "le site était hors service pendant plusieurs heures après l'attaque",
      "il y avait des milliers de personnes qui attendaient devant le stade",
      "mon ordinateur plante chaque fois que j'ouvre ce programme",
      "tout le monde devrait utiliser des mots de passe robustes",
      "elle lisait un livre pendant qu'il préparait le dîner",
      "vous trouverez plus d'informations sur notre site",
      "la police a arrêté deux hommes qui vendaient des cartes volées",
      "il est important de garder votre système à jour",
      "les enfants ont joué dans le jardin jusqu'à la nuit",
      "la base de données de l'entreprise était exposée sur internet",
  };
  return kText;
}

const std::vector<std::string>& german_corpus() {
  static const std::vector<std::string> kText = {
      "der schnelle braune fuchs springt über den faulen hund",
      "sicherheitsforscher haben eine neue schwachstelle in der software entdeckt",
      "hacker haben millionen von passwörtern der nutzer gestohlen",
      "bitte aktualisieren sie ihren browser so schnell wie möglich",
      "wir fahren am wochenende mit unseren freunden an den strand",
      "die regierung hat neue regeln für den datenschutz angekündigt",
      "das ist einer der schlimmsten angriffe die wir seit jahren gesehen haben",
      "ich glaube es wird morgen regnen also nimm einen schirm mit",
      "die bank warnte ihre kunden vor gefälschten e mails",
      "danke für das teilen dieses tollen artikels über sicherheit",
      "was hältst du von dem neuen telefon das gestern erschienen ist",
      "unser team arbeitet hart daran das problem zu beheben",
      "die webseite war nach dem angriff mehrere stunden nicht erreichbar",
      "tausende menschen warteten vor dem stadion",
      "mein computer stürzt jedes mal ab wenn ich das programm öffne",
      "jeder sollte sichere passwörter verwenden",
      "sie las ein buch während er in der küche das abendessen kochte",
      "weitere informationen finden sie auf unserer webseite",
      "die polizei hat zwei männer festgenommen die gestohlene karten verkauften",
      "es ist wichtig das betriebssystem aktuell zu halten",
      "die kinder spielten im garten bis es dunkel wurde",
      "die datenbank des unternehmens war im internet ungeschützt",
  };
  return kText;
}

const std::vector<std::string>& turkish_corpus() {
  static const std::vector<std::string> kText = {
      "hızlı kahverengi tilki tembel köpeğin üzerinden atlar",
      "güvenlik araştırmacıları yazılımda yeni bir açık keşfetti",
      "bilgisayar korsanları milyonlarca kullanıcının şifresini çaldı",
      "lütfen tarayıcınızı en kısa sürede güncelleyin",
      "bu hafta sonu arkadaşlarımızla sahile gidiyoruz",
      "hükümet veri koruması için yeni kurallar açıkladı",
      "bu yıllardır gördüğümüz en kötü saldırılardan biri",
      "bence yarın yağmur yağacak o yüzden şemsiye al",
      "banka müşterilerini sahte e postalar konusunda uyardı",
      "güvenlik hakkındaki bu harika makaleyi paylaştığın için teşekkürler",
      "dün çıkan yeni telefon hakkında ne düşünüyorsun",
      "ekibimiz sorunu çözmek için çok çalışıyor",
      "saldırıdan sonra web sitesi birkaç saat boyunca çalışmadı",
      "stadyumun önünde binlerce kişi bekliyordu",
      "o programı her açtığımda bilgisayarım çöküyor",
      "herkes güçlü şifreler kullanmalı",
      "o kitap okurken o mutfakta akşam yemeği pişiriyordu",
      "daha fazla bilgiyi web sitemizde bulabilirsiniz",
      "polis çalıntı kart satan iki adamı tutukladı",
      "işletim sistemini güncel tutmak önemlidir",
      "çocuklar hava kararana kadar bahçede oynadı",
      "şirketin veritabanı internette açıkta kaldı",
  };
  return kText;
}

}  // namespace

LanguageIdentifier LanguageIdentifier::with_bundled_corpora() {
  LanguageIdentifier id;
  id.train("en", english_corpus());
  id.train("es", spanish_corpus());
  id.train("fr", french_corpus());
  id.train("de", german_corpus());
  id.train("tr", turkish_corpus());
  return id;
}

void LanguageIdentifier::train(const std::string& language,
                               const std::vector<std::string>& texts) {
  Model& m = models_[language];
  for (const auto& t : texts) {
    bool alpha = false;
    for (auto& g : trigrams(t, &alpha)) {
      m.counts[g] += 1;
      m.total += 1;
      trigram_vocab_.emplace(std::move(g), 0);
    }
  }
}

std::vector<std::string> LanguageIdentifier::languages() const {
  std::vector<std::string> out;
  for (const auto& [lang, _] : models_) out.push_back(lang);
  return out;
}

std::map<std::string, double> LanguageIdentifier::scores(
    std::string_view text) const {
  if (!trained()) throw ConfigError("language identifier is not trained");
  bool alpha = false;
  auto grams = trigrams(text, &alpha);
  std::map<std::string, double> out;
  if (!alpha) return out;
  // Add-one smoothing over the shared trigram inventory plus one unseen slot.
  const double vocab = static_cast<double>(trigram_vocab_.size()) + 1.0;
  for (const auto& [lang, m] : models_) {
    double s = 0;
    for (const auto& g : grams) {
      auto it = m.counts.find(g);
      double c = it == m.counts.end() ? 0.0 : it->second;
      s += std::log((c + 1.0) / (m.total + vocab));
    }
    out[lang] = s;
  }
  return out;
}

std::string LanguageIdentifier::classify(std::string_view text) const {
  auto s = scores(text);
  std::string best;
  double best_score = -std::numeric_limits<double>::infinity();
  bool tie = false;
  for (const auto& [lang, score] : s) {
    if (score > best_score) {
      best = lang;
      best_score = score;
      tie = false;
    } else if (score == best_score) {
      tie = true;
    }
  }
  return tie ? std::string() : best;
}

bool detect_english(const RawTweet& tweet, const LanguageIdentifier& id) {
  bool blank = true;
  for (unsigned char c : tweet.text) {
    if (!std::isspace(c)) {
      blank = false;
      break;
    }
  }
  if (blank) throw PreconditionError("detect_english: empty text");
  if (!id.trained()) throw ConfigError("language identifier is not trained");
  return id.classify(tweet.text) == "en";
}

std::vector<RawTweet> filter_english(const std::vector<RawTweet>& corpus,
                                     const LanguageIdentifier& id) {
  std::vector<RawTweet> out;
  for (const auto& t : corpus) {
    if (detect_english(t, id)) out.push_back(t);
  }
  return out;
}

}  // namespace cyber
