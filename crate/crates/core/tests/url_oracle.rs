use wikicite_core::wikitext::extract_url;

// Hand-labeled references in the styles found across language editions.
const CASES: &[(&str, Option<&str>)] = &[
    ("<ref>{{cite web |url=https://www.environment-agency.gov.uk/thames-facts |title=Thames facts}}</ref>", Some("https://www.environment-agency.gov.uk/thames-facts")),
    ("<ref>{{cite book |last=Dalton |first=Ian |title=The Thames Path |year=2010}}</ref>", None),
    ("<ref>{{cite news |url=https://www.theguardian.com/environment/2007/thames-revival |title=Thames revival}}</ref>", Some("https://www.theguardian.com/environment/2007/thames-revival")),
    ("<ref>{{cite web |url=https://web.archive.org/web/20150101000000/http://www.gov.uk/thames-barrier |title=Thames Barrier}}</ref>", Some("https://web.archive.org/web/20150101000000/http://www.gov.uk/thames-barrier")),
    ("<ref>{{cite web |title=Who Was Ada? |url=https://www.findingada.com/about/who-was-ada/ |archive-url=https://web.archive.org/web/2014/http://findingada.com/ }}</ref>", Some("https://www.findingada.com/about/who-was-ada/")),
    ("<ref>{{cite journal |doi=10.1109/MAHC.2003.1253887 |title=Lovelace & Babbage}}</ref>", None),
    ("<ref>[http://www.artima.com/intv/pythonP.html The Making of Python], Artima, 2003.</ref>", Some("http://www.artima.com/intv/pythonP.html")),
    ("<ref>[https://www.nobelprize.org/prizes/chemistry/1911/summary/]</ref>", Some("https://www.nobelprize.org/prizes/chemistry/1911/summary/")),
    ("<ref>See http://example.org/page.</ref>", Some("http://example.org/page")),
    ("<ref>Smith 2010, p. 5.</ref>", None),
    ("<ref>{{Lien web |url=https://www.insee.fr/fr/statistiques/zones/69123 |titre=Comparateur de territoire}}</ref>", Some("https://www.insee.fr/fr/statistiques/zones/69123")),
    ("<ref>{{Ouvrage |auteur=André Pelletier |titre=Histoire de Lyon |année=2007}}</ref>", None),
    ("<ref>{{Article |titre=Les Curie entrent au Panthéon |url=https://www.lemonde.fr/archives/article/1995/04/21/curie}}</ref>", Some("https://www.lemonde.fr/archives/article/1995/04/21/curie")),
    ("<ref>P. Curie, M. Curie, « Sur une substance nouvelle », ''Comptes rendus'', 1898.</ref>", None),
    ("<ref>{{Internetquelle |url=https://www.bkg.bund.de/DE/Zugspitze.html |titel=Die Höhe der Zugspitze |abruf=2023-05-10}}</ref>", Some("https://www.bkg.bund.de/DE/Zugspitze.html")),
    ("<ref>{{Literatur |Autor=Manfred Kühn |Titel=Kant |Jahr=2003 |ISBN=3-406-50921-X}}</ref>", None),
    ("<ref>{{Literatur |Titel=Was ist Aufklärung? |Online=https://de.wikisource.org/wiki/Aufkl%C3%A4rung}}</ref>", Some("https://de.wikisource.org/wiki/Aufkl%C3%A4rung")),
    ("<ref>{{cita web |url=https://www.ine.es/jaxiT3/Datos.htm?t=2881 |título=Población}}</ref>", Some("https://www.ine.es/jaxiT3/Datos.htm?t=2881")),
    ("<ref>{{cita libro |apellidos=Canavaggio |título=Cervantes |año=2003}}</ref>", None),
    ("<ref>{{cita publicación |título=La muralla |url=http://www.madrid.org/arqueologia/muralla.pdf}}</ref>", Some("http://www.madrid.org/arqueologia/muralla.pdf")),
    ("<ref>{{книга |автор=Галазий Г. И. |заглавие=Байкал в вопросах и ответах |год=1987}}</ref>", None),
    ("<ref>{{статья |автор=Тимошкин О. А. |ссылка=http://www.lin.irk.ru/fauna/}}</ref>", Some("http://www.lin.irk.ru/fauna/")),
    ("<ref>{{cite web |url=https://pushkinmuseum.ru/duel |title=Дуэль и смерть Пушкина}}</ref>", Some("https://pushkinmuseum.ru/duel")),
    ("<ref>Белинский В. Г. Сочинения Александра Пушкина // Отечественные записки. 1845.</ref>", None),
    ("<ref>{{Cite web|和書|url=https://www.gsi.go.jp/kihonjohochousa/kihonjohochousa41139.html |title=日本の主な山岳標高}}</ref>", Some("https://www.gsi.go.jp/kihonjohochousa/kihonjohochousa41139.html")),
    ("<ref>{{Cite book|和書|author=小山真人 |title=富士山噴火とハザードマップ |year=2009}}</ref>", None),
    ("<ref>{{cite web |url=http://www.ncha.gov.cn/art/2012/6/5/art_722_111101.html |title=长城资源认定}}</ref>", Some("http://www.ncha.gov.cn/art/2012/6/5/art_722_111101.html")),
    ("<ref>{{cite book |author=罗哲文 |title=长城 |year=1982}}</ref>", None),
    ("<ref>{{cite web\n |url=http://www.fourmilab.ch/babbage/sketch.html\n |title=Sketch\n}}</ref>", Some("http://www.fourmilab.ch/babbage/sketch.html")),
    ("<ref>{{cite web | url = https://x.example/a b | title = Spaces}}</ref>", Some("https://x.example/a")),
    ("<ref>{{cite web |url=<!-- dead link -->https://y.example/ok |title=T}}</ref>", Some("https://y.example/ok")),
    ("<ref>{{cite web |url= |title=Empty}} Available at https://fallback.example/x</ref>", Some("https://fallback.example/x")),
    ("<ref>{{cite web |URL=https://upper.example/ |title=Case}}</ref>", Some("https://upper.example/")),
    ("<ref>https://en.wikipedia.org/wiki/Foo_(bar)</ref>", Some("https://en.wikipedia.org/wiki/Foo_(bar)")),
    ("<ref>(https://en.example/wiki/page)</ref>", Some("https://en.example/wiki/page")),
    ("<ref>Retrieved from HTTPS://SHOUT.EXAMPLE/Page;</ref>", Some("HTTPS://SHOUT.EXAMPLE/Page")),
    ("<ref>ftp://files.example/a.txt</ref>", None),
    ("<ref>Mirror: //proto.example/x</ref>", None),
    ("<ref>{{harvnb|Stein|1985|p=17}}</ref>", None),
    ("<ref name=\"x\"/>", None),
    ("<ref>[https://a.example/one First] and [https://b.example/two Second]</ref>", Some("https://a.example/one")),
    ("<ref>{{cite web |title=T |archive-url=https://web.archive.org/web/1/http://z.example |url=http://z.example/page}}</ref>", Some("http://z.example/page")),
    ("<ref>{{cite web |url=https://q.example/?a=1&b=2 |title=Query}}</ref>", Some("https://q.example/?a=1&b=2")),
    ("<ref>{{cite web |url=https://r.example/path, |title=Comma}}</ref>", Some("https://r.example/path")),
    ("<ref>Report (2019). https://s.example/report.pdf, accessed 2020.</ref>", Some("https://s.example/report.pdf")),
    ("<ref>{{#tag:ref|Nested note with https://t.example/n}}</ref>", Some("https://t.example/n")),
    ("<ref>'''Bold''' http://u.example/bold''' trailing</ref>", Some("http://u.example/bold")),
    ("{{cite web|url=https://example.com/p|title=T}}", Some("https://example.com/p")),
    ("[http://a.b/c Title]", Some("http://a.b/c")),
    ("Smith 2010, p. 5", None),
];

#[test]
fn hand_labeled_refs() {
    assert!(CASES.len() >= 50);
    let mut wrong = Vec::new();
    for (content, expected) in CASES {
        let got = extract_url(content);
        if got.as_deref() != *expected {
            wrong.push(format!("{content:?}: got {got:?}, expected {expected:?}"));
        }
    }
    assert!(wrong.is_empty(), "{}", wrong.join("\n"));
}
